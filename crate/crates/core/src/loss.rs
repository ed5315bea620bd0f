//! Reference implementations of the residual training losses.
//!
//! The prediction is always `pseudo + residual`. The depth term compares it to
//! sparse ground truth; the structural terms (gradient and SSIM) compare it to
//! the dense pseudo ground truth. These are forward computations only, meant
//! for validating external training code.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::depth::{ensure_dims, DepthImage, ResidualImage};
use crate::error::{Error, Result};
use crate::metrics::CompensatedSum;
use crate::morphology::forward_gradient_l1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SsimWindow {
    /// Equal weights over the window.
    Uniform,
    /// Separable Gaussian weights, normalized to sum to one.
    Gaussian { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossConfig {
    /// Weight of the structural terms.
    pub lambda: f64,
    pub ssim_window: usize,
    pub ssim_weighting: SsimWindow,
    pub ssim_c1: f64,
    pub ssim_c2: f64,
    /// Meters. Only used to derive `ssim_c1`/`ssim_c2` in [`LossConfig::with_dynamic_range`].
    pub dynamic_range: f64,
    /// Rows excluded from every term.
    pub top_crop_rows: usize,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            ssim_window: 11,
            ssim_weighting: SsimWindow::Uniform,
            ssim_c1: 0.0,
            ssim_c2: 0.0,
            dynamic_range: 0.0,
            top_crop_rows: 100,
        }
        .with_dynamic_range(85.0)
    }
}

impl LossConfig {
    /// Sets `L` and the stabilizers `c1 = (0.01 L)^2`, `c2 = (0.03 L)^2`.
    pub fn with_dynamic_range(mut self, range: f64) -> Self {
        self.dynamic_range = range;
        self.ssim_c1 = (0.01 * range).powi(2);
        self.ssim_c2 = (0.03 * range).powi(2);
        self
    }

    pub fn full_frame(mut self) -> Self {
        self.top_crop_rows = 0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.ssim_window < 3 || self.ssim_window.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "SSIM window must be odd and >= 3, got {}",
                self.ssim_window
            )));
        }
        if !(self.ssim_c1 > 0.0 && self.ssim_c2 > 0.0) {
            return Err(Error::Config("SSIM constants must be > 0".into()));
        }
        if let SsimWindow::Gaussian { sigma } = self.ssim_weighting {
            if !(sigma > 0.0) {
                return Err(Error::Config(format!("Gaussian sigma must be > 0, got {sigma}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    /// m^2
    pub l_depth: f64,
    /// m / pixel
    pub l_grad: f64,
    pub l_ssim: f64,
    pub l_total: f64,
}

impl fmt::Display for LossReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "l_depth: {:.9}", self.l_depth)?;
        writeln!(f, "l_grad: {:.9}", self.l_grad)?;
        writeln!(f, "l_ssim: {:.9}", self.l_ssim)?;
        write!(f, "l_total: {:.9}", self.l_total)
    }
}

/// First row of the evaluated band, checked against the image height.
fn region_start(cfg: &LossConfig, height: usize) -> Result<usize> {
    if cfg.top_crop_rows >= height {
        return Err(Error::NoValidPixels);
    }
    Ok(cfg.top_crop_rows)
}

/// `pseudo + residual` over rows `start..`, requiring `target` and `pseudo` to be dense there.
fn dense_pair(
    target: &DepthImage,
    pseudo: &DepthImage,
    residual: &ResidualImage,
    start: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    target.ensure_same_dims(pseudo)?;
    ensure_dims(pseudo.dims(), residual.dims())?;
    let w = pseudo.width();
    let from = start * w;
    let mut t = Vec::with_capacity(pseudo.len() - from);
    let mut p = Vec::with_capacity(pseudo.len() - from);
    for i in from..pseudo.len() {
        match (target.at(i), pseudo.at(i)) {
            (Some(a), Some(b)) => {
                t.push(a);
                p.push(b + residual.values()[i]);
            }
            _ => return Err(Error::NotDense { x: i % w, y: i / w }),
        }
    }
    Ok((t, p))
}

/// Mean squared residual error over valid ground-truth pixels, m^2.
pub fn depth_loss(
    gt: &DepthImage,
    pseudo: &DepthImage,
    residual: &ResidualImage,
    cfg: &LossConfig,
) -> Result<f64> {
    gt.ensure_same_dims(pseudo)?;
    ensure_dims(gt.dims(), residual.dims())?;
    let w = gt.width();
    let from = region_start(cfg, gt.height())? * w;
    let mut sum = CompensatedSum::default();
    let mut n = 0usize;
    for i in from..gt.len() {
        let Some(d) = gt.at(i) else { continue };
        let p = pseudo.at(i).ok_or(Error::NotDense { x: i % w, y: i / w })?;
        let e = d - p - residual.values()[i];
        sum.add(e * e);
        n += 1;
    }
    if n == 0 {
        return Err(Error::NoValidPixels);
    }
    Ok(sum.value() / n as f64)
}

/// Mean of `|dx e| + |dy e|` with `e = pseudo_gt - (pseudo + residual)`.
pub fn grad_loss(
    pseudo_gt: &DepthImage,
    pseudo: &DepthImage,
    residual: &ResidualImage,
    cfg: &LossConfig,
) -> Result<f64> {
    let start = region_start(cfg, pseudo_gt.height())?;
    let (target, pred) = dense_pair(pseudo_gt, pseudo, residual, start)?;
    let w = pseudo_gt.width();
    let h = pseudo_gt.height() - start;
    let diff: Vec<f64> = target.iter().zip(&pred).map(|(a, b)| a - b).collect();
    let grad = forward_gradient_l1(&diff, &vec![true; diff.len()], w, h);
    let mut sum = CompensatedSum::default();
    grad.iter().for_each(|&g| sum.add(g));
    Ok(sum.value() / grad.len() as f64)
}

fn window_weights(cfg: &LossConfig) -> Vec<f64> {
    let k = cfg.ssim_window;
    match cfg.ssim_weighting {
        SsimWindow::Uniform => vec![1.0 / (k * k) as f64; k * k],
        SsimWindow::Gaussian { sigma } => {
            let r = (k / 2) as f64;
            let g: Vec<f64> = (0..k)
                .map(|i| {
                    let d = i as f64 - r;
                    (-d * d / (2.0 * sigma * sigma)).exp()
                })
                .collect();
            let mut w: Vec<f64> = g.iter().flat_map(|&a| g.iter().map(move |&b| a * b)).collect();
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= total);
            w
        }
    }
}

/// Mean SSIM over every window position fully inside a `w x h` grid.
fn mean_ssim(a: &[f64], b: &[f64], w: usize, h: usize, cfg: &LossConfig) -> Result<f64> {
    let k = cfg.ssim_window;
    if k > w || k > h {
        return Err(Error::WindowTooLarge {
            window: k,
            width: w,
            height: h,
        });
    }
    let weights = window_weights(cfg);
    let (c1, c2) = (cfg.ssim_c1, cfg.ssim_c2);
    let mut total = CompensatedSum::default();
    let mut windows = 0usize;
    for y0 in 0..=h - k {
        for x0 in 0..=w - k {
            let taps = || {
                (0..k).flat_map(move |dy| (0..k).map(move |dx| (y0 + dy) * w + x0 + dx))
            };
            let (mut mx, mut my) = (0.0, 0.0);
            for (i, wt) in taps().zip(&weights) {
                mx += wt * a[i];
                my += wt * b[i];
            }
            let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
            for (i, wt) in taps().zip(&weights) {
                let (da, db) = (a[i] - mx, b[i] - my);
                vx += wt * da * da;
                vy += wt * db * db;
                cxy += wt * da * db;
            }
            let ssim = ((2.0 * mx * my + c1) * (2.0 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
            total.add(ssim);
            windows += 1;
        }
    }
    Ok(total.value() / windows as f64)
}

/// Structural similarity between two dense depth maps over the configured region.
pub fn ssim(a: &DepthImage, b: &DepthImage, cfg: &LossConfig) -> Result<f64> {
    cfg.validate()?;
    let start = region_start(cfg, a.height())?;
    let zero = ResidualImage::zeros(b.width(), b.height())?;
    let (x, y) = dense_pair(a, b, &zero, start)?;
    mean_ssim(&x, &y, a.width(), a.height() - start, cfg)
}

/// `0.5 * (1 - SSIM(pseudo_gt, pseudo + residual))`.
pub fn ssim_loss(
    pseudo_gt: &DepthImage,
    pseudo: &DepthImage,
    residual: &ResidualImage,
    cfg: &LossConfig,
) -> Result<f64> {
    cfg.validate()?;
    let start = region_start(cfg, pseudo_gt.height())?;
    let (x, y) = dense_pair(pseudo_gt, pseudo, residual, start)?;
    let s = mean_ssim(&x, &y, pseudo_gt.width(), pseudo_gt.height() - start, cfg)?;
    Ok(0.5 * (1.0 - s))
}

/// `l_depth + lambda * (l_grad + l_ssim)` with every component reported.
pub fn total_loss(
    gt: &DepthImage,
    pseudo_gt: &DepthImage,
    pseudo: &DepthImage,
    residual: &ResidualImage,
    cfg: &LossConfig,
) -> Result<LossReport> {
    cfg.validate()?;
    let l_depth = depth_loss(gt, pseudo, residual, cfg)?;
    let l_grad = grad_loss(pseudo_gt, pseudo, residual, cfg)?;
    let l_ssim = ssim_loss(pseudo_gt, pseudo, residual, cfg)?;
    Ok(LossReport {
        l_depth,
        l_grad,
        l_ssim,
        l_total: l_depth + cfg.lambda * (l_grad + l_ssim),
    })
}
