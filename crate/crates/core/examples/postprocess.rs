// Drop predicted pixels that stray too far from the pseudo depth map.
//
// `cargo run --example postprocess`

use std::error::Error;

use pseudo_depth::predictor::{BandReference, DepthPredictor};
use pseudo_depth::{postprocess, predict_dense, pseudo_depth, DepthImage, MorphConfig, PredictionSource, ThresholdSchedule};

/// A toy predictor that adds a depth-proportional wobble to the pseudo map.
struct Wobble;

impl DepthPredictor for Wobble {
    fn predict(&self, _frame: &str, _sparse: &DepthImage, pseudo: &DepthImage) -> pseudo_depth::Result<DepthImage> {
        let (w, h) = pseudo.dims();
        DepthImage::from_fn(w, h, |x, y| pseudo.get(x, y).map(|d| d * (1.0 + 0.02 * ((x + y) % 3) as f64)))
    }
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (w, h) = (80, 40);
    let sparse = DepthImage::from_fn(w, h, |x, y| (x % 4 == 0 && y % 3 == 0).then_some(2.0 + x as f64))?;
    let pseudo = pseudo_depth(&sparse, &MorphConfig::default().uncropped())?;

    let baseline = predict_dense("demo", &sparse, &pseudo, &PredictionSource::ZeroResidual)?;
    let wobbly = predict_dense("demo", &sparse, &pseudo, &Wobble)?;

    let schedules: Vec<ThresholdSchedule> = vec![
        ThresholdSchedule::default(),
        "global:1".parse()?,
        "5:0.05,20:0.5,inf:2".parse()?,
    ];
    for s in &schedules {
        let kept_base = postprocess(&baseline, &pseudo, s, BandReference::Predicted)?.valid_count();
        let kept = postprocess(&wobbly, &pseudo, s, BandReference::Predicted)?.valid_count();
        let kept_pseudo = postprocess(&wobbly, &pseudo, s, BandReference::Pseudo)?.valid_count();
        println!(
            "{s:<24} baseline {kept_base}/{n}  wobble {kept}/{n}  (bands by pseudo depth: {kept_pseudo})",
            n = w * h
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
