// Densify a sparse LiDAR depth map.
//
// `cargo run --example densify [sparse.png [out.png]]`
//
// Without arguments a synthetic scan is used: a road plane with a car-sized
// box in front of it, sampled on every 4th row like a spinning LiDAR.

use std::env;
use std::error::Error;

use pseudo_depth::morphology::{Blur, Kernel};
use pseudo_depth::{density, density_below, pseudo_depth, read_depth_png, write_depth_png, DepthImage, MorphConfig};

fn synthetic_scan() -> Result<DepthImage, pseudo_depth::Error> {
    let (fy, cy, cam_height) = (721.5, 40.0, 1.65);
    DepthImage::from_fn(320, 120, |x, y| {
        if y < 44 || y % 4 != 0 || x % 3 != 0 {
            return None;
        }
        let road = fy * cam_height / (y as f64 - cy);
        let car = (140..200).contains(&x) && y < 90;
        Some(if car { road.min(12.0) } else { road.min(80.0) })
    })
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let args: Vec<String> = env::args().skip(1).collect();
    let (sparse, crop) = match args.first() {
        Some(path) => (read_depth_png(path)?, 100),
        None => (synthetic_scan()?, 40),
    };
    let cfg = MorphConfig {
        top_crop_rows: crop,
        ..MorphConfig::default()
    };
    let dense = pseudo_depth(&sparse, &cfg)?;
    println!("sparse density below row {crop}: {:.2}%", 100.0 * density_below(&sparse, crop).density);
    println!("dense density below row {crop}:  {:.2}%", 100.0 * density_below(&dense, crop).density);
    println!("whole-frame density:          {:.2}%", 100.0 * density(&dense).density);

    // A larger dilation kernel plus a median blur gives a smoother map.
    let smooth = MorphConfig {
        dilation_kernel: Kernel::diamond(7),
        blur: Blur::Median { size: 5 },
        ..cfg
    };
    let blurred = pseudo_depth(&sparse, &smooth)?;
    let (w, h) = blurred.dims();
    println!("centre pixel: {:?} (default) vs {:?} (smoothed)", dense.get(w / 2, h - 10), blurred.get(w / 2, h - 10));

    if let Some(out) = args.get(1) {
        write_depth_png(out, &dense)?;
        println!("wrote {out}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
