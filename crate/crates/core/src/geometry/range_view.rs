use nalgebra::Point3;
use serde::{Deserialize, Serialize};

use super::cloud::PointCloud;
use crate::error::{Error, Result};

/// Uniform elevation binning of a spinning LiDAR scan (sensor frame, z up).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RangeViewConfig {
    pub min_elevation_deg: f64,
    pub max_elevation_deg: f64,
    pub rows: usize,
}

impl Default for RangeViewConfig {
    /// Approximates the HDL-64E vertical field of view.
    fn default() -> Self {
        Self {
            min_elevation_deg: -24.9,
            max_elevation_deg: 2.0,
            rows: 64,
        }
    }
}

impl RangeViewConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || !(self.max_elevation_deg > self.min_elevation_deg) {
            return Err(Error::Config(format!(
                "range view needs rows > 0 and max > min elevation, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Elevation angle of a point in degrees.
    pub fn elevation_deg(p: &Point3<f64>) -> f64 {
        p.z.atan2(p.x.hypot(p.y)).to_degrees()
    }

    /// Row index, 0 at the top of the field of view. Out-of-range angles clamp to the edge rows.
    pub fn row(&self, p: &Point3<f64>) -> usize {
        let span = self.max_elevation_deg - self.min_elevation_deg;
        let t = (self.max_elevation_deg - Self::elevation_deg(p)) / span;
        let r = (t * self.rows as f64).floor();
        r.clamp(0.0, (self.rows - 1) as f64) as usize
    }
}

/// Keeps range-view rows whose index is a multiple of `keep_every`.
///
/// `keep_every = 2` emulates a 32-line sensor from a 64-line scan, `4` a 16-line one.
pub fn subsample_scan(cloud: &PointCloud, keep_every: usize, cfg: &RangeViewConfig) -> Result<PointCloud> {
    cfg.validate()?;
    if keep_every == 0 {
        return Err(Error::Config("keep_every must be >= 1".into()));
    }
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    Ok(cloud.select(|_, p| cfg.row(p).is_multiple_of(keep_every)))
}
