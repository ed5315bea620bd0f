// Training losses for a residual depth network.
//
// `cargo run --example losses`
//
// The network predicts a residual that is added to the pseudo depth map. The
// depth term compares against sparse ground truth; the gradient and SSIM terms
// compare the residual with the one implied by the pseudo ground truth.

use std::error::Error;

use pseudo_depth::loss::SsimWindow;
use pseudo_depth::{
    pseudo_depth, pseudo_ground_truth, total_loss, DepthImage, LossConfig, LossReport, MorphConfig, ResidualImage,
};

fn show(label: &str, r: &LossReport) {
    println!(
        "{label:<22} depth {:.4}  grad {:.4}  ssim {:.4}  total {:.4}",
        r.l_depth, r.l_grad, r.l_ssim, r.l_total
    );
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (w, h) = (64, 40);
    let truth = DepthImage::from_fn(w, h, |x, y| Some(5.0 + 0.2 * y as f64 + if x > 30 { 3.0 } else { 0.0 }))?;
    let sparse = DepthImage::from_fn(w, h, |x, y| (y % 4 == 0 && x % 3 == 0).then(|| truth.get(x, y)).flatten())?;
    let gt = DepthImage::from_fn(w, h, |x, y| ((x + y) % 2 == 0).then(|| truth.get(x, y)).flatten())?;

    let morph = MorphConfig::default().uncropped();
    let pseudo = pseudo_depth(&sparse, &morph)?;
    let pseudo_gt = pseudo_ground_truth(&gt, &morph)?;
    let cfg = LossConfig {
        ssim_window: 7,
        ..LossConfig::default().full_frame()
    };

    let zero = ResidualImage::zeros(w, h)?;
    show("zero residual", &total_loss(&gt, &pseudo_gt, &pseudo, &zero, &cfg)?);
    // Matches the pseudo ground truth exactly, so only the depth term remains.
    let to_pseudo_gt = ResidualImage::between(&pseudo_gt, &pseudo)?;
    show("pseudo-GT residual", &total_loss(&gt, &pseudo_gt, &pseudo, &to_pseudo_gt, &cfg)?);
    let to_truth = ResidualImage::between(&truth, &pseudo)?;
    show("true residual", &total_loss(&gt, &pseudo_gt, &pseudo, &to_truth, &cfg)?);

    let gaussian = LossConfig {
        ssim_window: 11,
        ssim_weighting: SsimWindow::Gaussian { sigma: 1.5 },
        lambda: 0.5,
        ..cfg
    };
    show("zero, gaussian window", &total_loss(&gt, &pseudo_gt, &pseudo, &zero, &gaussian)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
