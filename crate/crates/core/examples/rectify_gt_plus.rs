// Remove see-through LiDAR points and build a denser ground truth (GT+).
//
// `cargo run --example rectify_gt_plus`
//
// The scene is a wall 10 m away. A few returns from a building 40 m behind it
// leak through, as happens when the LiDAR and camera see the scene from
// slightly different positions.

use std::error::Error;

use pseudo_depth::{build_gt_plus, density, pseudo_depth, rectify_sparse, DepthImage, MorphConfig, RectifyConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (w, h) = (60, 30);
    let sparse = DepthImage::from_fn(w, h, |x, y| {
        if y % 3 != 0 || x % 2 != 0 {
            None
        } else if (x + y) % 17 == 0 {
            Some(40.0)
        } else {
            Some(10.0 + 0.01 * x as f64)
        }
    })?;
    let gt = DepthImage::from_fn(w, h, |x, y| ((x * 7 + y * 3) % 5 == 0).then_some(10.0 + 0.01 * x as f64))?;

    let cfg = MorphConfig::default().uncropped();
    let pseudo = pseudo_depth(&sparse, &cfg)?;
    let rectified = rectify_sparse(&sparse, &pseudo, &RectifyConfig::default())?;
    let gt_plus = build_gt_plus(&gt, &rectified)?;

    let far = |img: &DepthImage| img.iter().flatten().filter(|&d| d > 30.0).count();
    println!("sparse:    {:5.2}% dense, {} see-through points", 100.0 * density(&sparse).density, far(&sparse));
    println!("rectified: {:5.2}% dense, {} see-through points", 100.0 * density(&rectified).density, far(&rectified));
    println!("GT:        {:5.2}% dense", 100.0 * density(&gt).density);
    println!("GT+:       {:5.2}% dense", 100.0 * density(&gt_plus).density);

    // A looser threshold keeps more points.
    let loose = rectify_sparse(&sparse, &pseudo, &RectifyConfig::new(50.0)?)?;
    println!("threshold 50 m keeps {} of {} points", loose.valid_count(), sparse.valid_count());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
