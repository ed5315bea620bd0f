//! Dense prediction sources and threshold-based post-processing.
//!
//! A prediction is `pseudo + residual`. The zero-residual source returns the
//! pseudo map itself; the file-backed source loads predictions that an
//! external model has already composed and written as depth PNGs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset;
use crate::depth::DepthImage;
use crate::error::{Error, Result};
use crate::kitti_png::read_depth_png;

/// Default post-processing schedule in `upper:threshold` notation (meters).
pub const DYNAMIC_SCHEDULE: &str = "10:0.1,40:0.3,inf:0.5";

/// Global thresholds evaluated alongside the dynamic schedule.
pub const GLOBAL_PRESETS: [f64; 4] = [10.0, 5.0, 3.0, 1.0];

/// Piecewise-constant outlier threshold over depth bands.
///
/// A depth `d` falls into the first band with `d < upper`; the final band is unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ThresholdSchedule {
    bounded: Vec<(f64, f64)>,
    last: f64,
}

impl ThresholdSchedule {
    pub fn new(bounded: Vec<(f64, f64)>, last: f64) -> Result<Self> {
        let s = Self { bounded, last };
        s.validate()?;
        Ok(s)
    }

    /// 0.1 m below 10 m, 0.3 m up to 40 m, 0.5 m beyond.
    pub fn dynamic() -> Self {
        Self {
            bounded: vec![(10.0, 0.1), (40.0, 0.3)],
            last: 0.5,
        }
    }

    pub fn global(threshold: f64) -> Result<Self> {
        Self::new(Vec::new(), threshold)
    }

    fn validate(&self) -> Result<()> {
        let mut prev = f64::NEG_INFINITY;
        for &(upper, t) in &self.bounded {
            if !(upper > prev && upper.is_finite()) {
                return Err(Error::Config(format!(
                    "band upper bounds must be finite and strictly increasing, got {upper} after {prev}"
                )));
            }
            if !(t > 0.0) {
                return Err(Error::Config(format!("thresholds must be > 0, got {t}")));
            }
            prev = upper;
        }
        if !(self.last > 0.0) {
            return Err(Error::Config(format!("thresholds must be > 0, got {}", self.last)));
        }
        Ok(())
    }

    pub fn threshold(&self, depth: f64) -> f64 {
        self.bounded
            .iter()
            .find(|(upper, _)| depth < *upper)
            .map_or(self.last, |&(_, t)| t)
    }

    /// `(upper, threshold)` pairs with `f64::INFINITY` as the final bound.
    pub fn bands(&self) -> Vec<(f64, f64)> {
        let mut v = self.bounded.clone();
        v.push((f64::INFINITY, self.last));
        v
    }

    /// Same bands with every threshold multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.bounded.iter().map(|&(u, t)| (u, t * factor)).collect(),
            self.last * factor,
        )
    }
}

impl Default for ThresholdSchedule {
    fn default() -> Self {
        Self::dynamic()
    }
}

impl fmt::Display for ThresholdSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (upper, t) in &self.bounded {
            write!(f, "{upper}:{t},")?;
        }
        write!(f, "inf:{}", self.last)
    }
}

impl FromStr for ThresholdSchedule {
    type Err = Error;

    /// Accepts `dynamic`, `global:<t>`, a bare number, or `upper:t,...,inf:t`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "dynamic" {
            return Ok(Self::dynamic());
        }
        if let Some(t) = s.strip_prefix("global:") {
            return Self::global(parse_f64(t)?);
        }
        if let Ok(t) = s.parse::<f64>() {
            return Self::global(t);
        }
        let mut bounded = Vec::new();
        let mut last = None;
        for part in s.split(',') {
            let (upper, t) = part
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("expected upper:threshold, got {part:?}")))?;
            if last.is_some() {
                return Err(Error::Config("the unbounded band must come last".into()));
            }
            let t = parse_f64(t)?;
            match upper.trim() {
                "inf" | "∞" => last = Some(t),
                u => bounded.push((parse_f64(u)?, t)),
            }
        }
        let last = last.ok_or_else(|| Error::Config("schedule needs a final inf:<t> band".into()))?;
        Self::new(bounded, last)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("not a number: {s:?}")))
}

impl TryFrom<String> for ThresholdSchedule {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ThresholdSchedule> for String {
    fn from(s: ThresholdSchedule) -> String {
        s.to_string()
    }
}

/// Which depth selects the schedule band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandReference {
    #[default]
    Predicted,
    Pseudo,
}

/// Removes predicted pixels that deviate from the pseudo map by more than their band threshold.
///
/// Pixels without a pseudo depth underneath are removed.
pub fn postprocess(
    pred: &DepthImage,
    pseudo: &DepthImage,
    schedule: &ThresholdSchedule,
    band: BandReference,
) -> Result<DepthImage> {
    pred.ensure_same_dims(pseudo)?;
    Ok(pred.retain(|i, d| match pseudo.at(i) {
        Some(p) => {
            let key = match band {
                BandReference::Predicted => d,
                BandReference::Pseudo => p,
            };
            (d - p).abs() <= schedule.threshold(key)
        }
        None => false,
    }))
}

/// Anything that can produce a dense prediction for a frame.
pub trait DepthPredictor {
    fn predict(&self, frame: &str, sparse: &DepthImage, pseudo: &DepthImage) -> Result<DepthImage>;
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PredictionSource {
    /// The pseudo map itself.
    #[default]
    ZeroResidual,
    /// Depth PNGs in `dir`, matched to frames by filename stem.
    ExternalFiles { dir: PathBuf },
}

impl PredictionSource {
    fn external_path(dir: &Path, frame: &str) -> Result<PathBuf> {
        let direct = dir.join(format!("{frame}.png"));
        if direct.is_file() {
            return Ok(direct);
        }
        let key = dataset::frame_key(frame);
        dataset::list_pngs(dir)?
            .remove(&key)
            .ok_or(Error::MissingFile(direct))
    }
}

impl DepthPredictor for PredictionSource {
    fn predict(&self, frame: &str, _sparse: &DepthImage, pseudo: &DepthImage) -> Result<DepthImage> {
        match self {
            Self::ZeroResidual => Ok(pseudo.clone()),
            Self::ExternalFiles { dir } => {
                let pred = read_depth_png(Self::external_path(dir, frame)?)?;
                pred.ensure_same_dims(pseudo)?;
                Ok(pred)
            }
        }
    }
}

/// Convenience wrapper around [`DepthPredictor::predict`].
pub fn predict_dense(
    frame: &str,
    sparse: &DepthImage,
    pseudo: &DepthImage,
    source: &impl DepthPredictor,
) -> Result<DepthImage> {
    source.predict(frame, sparse, pseudo)
}
