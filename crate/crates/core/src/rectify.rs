//! Removal of penetration pixels and construction of the complemented ground truth.

use serde::{Deserialize, Serialize};

use crate::depth::DepthImage;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RectifyConfig {
    /// Maximum allowed `|sparse - pseudo|` in meters.
    pub threshold: f64,
}

impl Default for RectifyConfig {
    fn default() -> Self {
        Self { threshold: 1.0 }
    }
}

impl RectifyConfig {
    pub fn new(threshold: f64) -> Result<Self> {
        let cfg = Self { threshold };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0) {
            return Err(Error::Config(format!(
                "rectification threshold must be > 0, got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Drops sparse returns that disagree with the pseudo depth by more than the threshold.
///
/// Sparse pixels with no pseudo depth underneath (e.g. inside the cropped top
/// band) cannot be checked and are dropped as well.
pub fn rectify_sparse(
    sparse: &DepthImage,
    pseudo: &DepthImage,
    cfg: &RectifyConfig,
) -> Result<DepthImage> {
    cfg.validate()?;
    sparse.ensure_same_dims(pseudo)?;
    let reference = pseudo.values();
    let mask = pseudo.mask();
    Ok(sparse.retain(|i, d| mask[i] && (d - reference[i]).abs() <= cfg.threshold))
}

/// Ground truth supplemented with rectified sparse returns where ground truth is missing.
pub fn build_gt_plus(gt: &DepthImage, rectified_sparse: &DepthImage) -> Result<DepthImage> {
    gt.ensure_same_dims(rectified_sparse)?;
    let mut values = gt.values().to_vec();
    let mut valid = gt.mask().to_vec();
    for (i, px) in rectified_sparse.iter().enumerate() {
        if let (false, Some(d)) = (valid[i], px) {
            values[i] = d;
            valid[i] = true;
        }
    }
    Ok(DepthImage::from_parts_unchecked(
        gt.width(),
        gt.height(),
        values,
        valid,
    ))
}
