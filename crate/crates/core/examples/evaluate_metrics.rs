// Score a depth prediction against ground truth, GT+ and depth edges.
//
// `cargo run --example evaluate_metrics`

use std::error::Error;

use pseudo_depth::metrics::{MetricsAccumulator, OutlierMode};
use pseudo_depth::{edge_mask, evaluate, pseudo_depth, DepthImage, MorphConfig, OutlierRule};

fn scene(w: usize, h: usize) -> Result<DepthImage, pseudo_depth::Error> {
    // A pole 8 m away in front of a wall at 25 m.
    DepthImage::from_fn(w, h, |x, _| Some(if (20..26).contains(&x) { 8.0 } else { 25.0 }))
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (w, h) = (48, 24);
    let truth = scene(w, h)?;
    let gt = DepthImage::from_fn(w, h, |x, y| ((x + 2 * y) % 3 == 0).then(|| truth.get(x, y)).flatten())?;
    let sparse = DepthImage::from_fn(w, h, |x, y| (y % 4 == 0 && x % 2 == 0).then(|| truth.get(x, y)).flatten())?;

    // The densified map blurs the pole boundary; use it as the prediction.
    let cfg = MorphConfig::default().uncropped();
    let pred = pseudo_depth(&sparse, &cfg)?;
    let edges = edge_mask(&pred);
    println!("{} of {} pixels are depth edges", edges.count(), w * h);

    let report = evaluate(&pred, &gt, Some(&truth), Some(&edges), &OutlierRule::default())?;
    println!("{report}");

    // The literal outlier reading counts large-depth relative errors instead.
    let literal = OutlierRule {
        mode: OutlierMode::DepthAndRelative,
        ..OutlierRule::default()
    };
    let alt = evaluate(&pred, &gt, None, None, &literal)?;
    println!("outlier ratio with the depth-based rule: {:.4}", alt.outlier_ratio);

    // Pool pixels over several frames.
    let mut pooled = MetricsAccumulator::default();
    for shift in [0.0, 0.5, 1.0] {
        let p = DepthImage::from_fn(w, h, |x, y| pred.get(x, y).map(|d| d + shift))?;
        pooled.merge(&MetricsAccumulator::frame(&p, &gt, None, None, &OutlierRule::default())?);
    }
    println!("pooled RMSE over 3 frames: {:.1} mm", pooled.report()?.rmse);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
