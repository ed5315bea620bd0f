// Batch evaluation over a directory of KITTI frames, the library side of
// `pseudo-depth eval`.
//
// `cargo run --example evaluate_directory [root]`
//
// `root` is a depth-completion directory such as `val_selection_cropped`
// (or set `PSEUDO_DEPTH_DATA_ROOT`). Without one, a few synthetic frames are
// written to a temporary directory first.

use std::env;
use std::error::Error;
use std::path::{Path, PathBuf};

use pseudo_depth::commands::{run_eval, EvalOptions, RunConfig};
use pseudo_depth::dataset::{DatasetLayout, DATA_ROOT_ENV};
use pseudo_depth::{write_depth_png, DepthImage};

fn write_synthetic(root: &Path) -> Result<(), Box<dyn Error>> {
    for frame in 0..3 {
        let far = 20.0 + 5.0 * frame as f64;
        let truth = |x: usize, y: usize| if y < 20 { None } else { Some(if (30..50).contains(&x) { 9.0 } else { far }) };
        let sparse = DepthImage::from_fn(96, 48, |x, y| (y % 3 == 0 && x % 2 == 0).then(|| truth(x, y)).flatten())?;
        let gt = DepthImage::from_fn(96, 48, |x, y| ((x + y) % 2 == 0).then(|| truth(x, y)).flatten())?;
        let name = format!("{frame:010}.png");
        write_depth_png(root.join("velodyne_raw").join(&name), &sparse)?;
        write_depth_png(root.join("groundtruth_depth").join(&name), &gt)?;
    }
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut cfg = RunConfig::default();
    let root = match env::args().nth(1).or_else(|| env::var(DATA_ROOT_ENV).ok()) {
        Some(root) => PathBuf::from(root),
        None => {
            let root = env::temp_dir().join("pseudo-depth-example").join("dataset");
            write_synthetic(&root)?;
            cfg.morph.top_crop_rows = 20;
            cfg.loss.top_crop_rows = 20;
            root
        }
    };
    let layout = DatasetLayout::from_root(&root)?;
    let opts = EvalOptions {
        pred_dir: None,
        gt_dir: layout.gt_dir.ok_or("dataset has no ground truth")?,
        sparse_dir: layout.sparse_dir,
        with_loss: true,
    };
    let outcome = run_eval(&opts, &cfg)?;
    for f in &outcome.frames {
        println!("{}: RMSE {:.1} mm, MAE {:.1} mm", f.frame, f.value.metrics.rmse, f.value.metrics.mae);
    }
    for s in &outcome.skipped {
        println!("skipped {}: {}", s.frame, s.reason);
    }
    if let Some(agg) = outcome.aggregate {
        println!("pooled over {} frames:\n{agg}", outcome.frames.len());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
