//! Depth completion metrics.
//!
//! Depth errors are reported in millimeters and inverse-depth errors in 1/km,
//! following the KITTI leaderboard. The evaluation set is always the pixels
//! valid in both the prediction and the reference. Sums run in a fixed order
//! with compensated accumulation, so results are reproducible bit-for-bit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::depth::DepthImage;
use crate::error::{Error, Result};
use crate::morphology::gradient_magnitude;

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierMode {
    /// `|error| > abs` and `|error| / ref > rel`.
    #[default]
    ErrorAndRelative,
    /// Literal reading: `ref > abs` and `|error| / ref > rel`.
    DepthAndRelative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutlierRule {
    pub mode: OutlierMode,
    /// Meters.
    pub absolute: f64,
    pub relative: f64,
}

impl Default for OutlierRule {
    fn default() -> Self {
        Self {
            mode: OutlierMode::ErrorAndRelative,
            absolute: 3.0,
            relative: 0.05,
        }
    }
}

impl OutlierRule {
    pub fn is_outlier(&self, pred: f64, reference: f64) -> bool {
        let err = (pred - reference).abs();
        let rel = err / reference;
        let gate = match self.mode {
            OutlierMode::ErrorAndRelative => err > self.absolute,
            OutlierMode::DepthAndRelative => reference > self.absolute,
        };
        gate && rel > self.relative
    }
}

/// Running error statistics that can be pooled across frames.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorStats {
    pub count: usize,
    sq_mm: CompensatedSum,
    abs_mm: CompensatedSum,
    sq_inv: CompensatedSum,
    abs_inv: CompensatedSum,
    pub outliers: usize,
}

impl ErrorStats {
    pub fn push(&mut self, pred: f64, reference: f64, rule: &OutlierRule) {
        let e = (pred - reference) * 1000.0;
        let ie = 1000.0 / pred - 1000.0 / reference;
        self.count += 1;
        self.sq_mm.add(e * e);
        self.abs_mm.add(e.abs());
        self.sq_inv.add(ie * ie);
        self.abs_inv.add(ie.abs());
        if rule.is_outlier(pred, reference) {
            self.outliers += 1;
        }
    }

    /// Accumulates every pixel valid in `pred`, `reference` and `select` (if given).
    pub fn from_images(
        pred: &DepthImage,
        reference: &DepthImage,
        select: Option<&[bool]>,
        rule: &OutlierRule,
    ) -> Result<Self> {
        pred.ensure_same_dims(reference)?;
        let mut stats = Self::default();
        for (i, (p, r)) in pred.iter().zip(reference.iter()).enumerate() {
            if let (Some(p), Some(r)) = (p, r) {
                if select.is_none_or(|s| s[i]) {
                    stats.push(p, r, rule);
                }
            }
        }
        Ok(stats)
    }

    pub fn merge(&mut self, other: &ErrorStats) {
        self.count += other.count;
        self.sq_mm.merge(&other.sq_mm);
        self.abs_mm.merge(&other.abs_mm);
        self.sq_inv.merge(&other.sq_inv);
        self.abs_inv.merge(&other.abs_inv);
        self.outliers += other.outliers;
    }

    fn mean(&self, s: &CompensatedSum) -> Option<f64> {
        (self.count > 0).then(|| s.value().max(0.0) / self.count as f64)
    }

    pub fn rmse(&self) -> Option<f64> {
        self.mean(&self.sq_mm).map(f64::sqrt)
    }

    pub fn mae(&self) -> Option<f64> {
        self.mean(&self.abs_mm)
    }

    pub fn irmse(&self) -> Option<f64> {
        self.mean(&self.sq_inv).map(f64::sqrt)
    }

    pub fn imae(&self) -> Option<f64> {
        self.mean(&self.abs_inv)
    }

    pub fn outlier_ratio(&self) -> Option<f64> {
        (self.count > 0).then(|| self.outliers as f64 / self.count as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPair {
    pub root_mean_square: f64,
    pub mean_absolute: f64,
    pub count: usize,
}

fn nonempty(stats: ErrorStats) -> Result<ErrorStats> {
    if stats.count == 0 {
        return Err(Error::EmptyEvaluationSet);
    }
    Ok(stats)
}

/// RMSE and MAE in millimeters.
pub fn rmse_mae(pred: &DepthImage, reference: &DepthImage) -> Result<ErrorPair> {
    let s = nonempty(ErrorStats::from_images(
        pred,
        reference,
        None,
        &OutlierRule::default(),
    )?)?;
    Ok(ErrorPair {
        root_mean_square: s.rmse().unwrap_or_default(),
        mean_absolute: s.mae().unwrap_or_default(),
        count: s.count,
    })
}

/// Inverse-depth RMSE and MAE in 1/km.
pub fn irmse_imae(pred: &DepthImage, reference: &DepthImage) -> Result<ErrorPair> {
    let s = nonempty(ErrorStats::from_images(
        pred,
        reference,
        None,
        &OutlierRule::default(),
    )?)?;
    Ok(ErrorPair {
        root_mean_square: s.irmse().unwrap_or_default(),
        mean_absolute: s.imae().unwrap_or_default(),
        count: s.count,
    })
}

pub fn outlier_ratio(pred: &DepthImage, reference: &DepthImage, rule: &OutlierRule) -> Result<f64> {
    let s = nonempty(ErrorStats::from_images(pred, reference, None, rule)?)?;
    Ok(s.outlier_ratio().unwrap_or_default())
}

/// RMSE against the complemented ground truth, mm.
pub fn rmse_gt_plus(pred: &DepthImage, gt_plus: &DepthImage) -> Result<f64> {
    Ok(rmse_mae(pred, gt_plus)?.root_mean_square)
}

/// High-gradient pixels of a pseudo depth map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMask {
    pub width: usize,
    pub height: usize,
    pub flags: Vec<bool>,
}

impl EdgeMask {
    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.flags[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }
}

/// Flags pixels whose gradient magnitude strictly exceeds the mean magnitude.
///
/// Both the gradient and its mean are taken over the valid pixels of `pseudo`.
pub fn edge_mask(pseudo: &DepthImage) -> EdgeMask {
    let grad = gradient_magnitude(pseudo);
    let flags = match grad.mean() {
        Some(mean) => grad
            .values
            .iter()
            .zip(&grad.mask)
            .map(|(&g, &m)| m && g > mean)
            .collect(),
        None => vec![false; grad.values.len()],
    };
    EdgeMask {
        width: grad.width,
        height: grad.height,
        flags,
    }
}

/// RMSE (mm) against GT+ restricted to edge pixels; `None` when no pixel qualifies.
pub fn rmse_edge(pred: &DepthImage, gt_plus: &DepthImage, mask: &EdgeMask) -> Result<Option<f64>> {
    pred.ensure_same_dims(gt_plus)?;
    crate::depth::ensure_dims(pred.dims(), (mask.width, mask.height))?;
    let s = ErrorStats::from_images(pred, gt_plus, Some(&mask.flags), &OutlierRule::default())?;
    Ok(s.rmse())
}

/// Scalar metric bundle for one frame or a pooled set of frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// mm
    pub rmse: f64,
    /// mm
    pub mae: f64,
    /// 1/km
    pub irmse: f64,
    /// 1/km
    pub imae: f64,
    pub outlier_ratio: f64,
    pub evaluated_pixels: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rmse_gt_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rmse_edge: Option<f64>,
}

impl MetricsReport {
    /// Flat `key: value` listing, one metric per line.
    pub fn to_key_value(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rmse_mm: {:.4}", self.rmse)?;
        writeln!(f, "mae_mm: {:.4}", self.mae)?;
        writeln!(f, "irmse_1_per_km: {:.4}", self.irmse)?;
        writeln!(f, "imae_1_per_km: {:.4}", self.imae)?;
        writeln!(f, "outlier_ratio: {:.6}", self.outlier_ratio)?;
        writeln!(f, "evaluated_pixels: {}", self.evaluated_pixels)?;
        match self.rmse_gt_plus {
            Some(v) => writeln!(f, "rmse_gt_plus_mm: {v:.4}")?,
            None => writeln!(f, "rmse_gt_plus_mm: n/a")?,
        }
        match self.rmse_edge {
            Some(v) => write!(f, "rmse_edge_mm: {v:.4}"),
            None => write!(f, "rmse_edge_mm: n/a"),
        }
    }
}

/// Pooled statistics behind a [`MetricsReport`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MetricsAccumulator {
    pub gt: ErrorStats,
    pub gt_plus: ErrorStats,
    pub edge: ErrorStats,
    has_gt_plus: bool,
    has_edge: bool,
}

impl MetricsAccumulator {
    /// Statistics of one frame. `gt_plus` and `edges` enable the complemented metrics.
    pub fn frame(
        pred: &DepthImage,
        gt: &DepthImage,
        gt_plus: Option<&DepthImage>,
        edges: Option<&EdgeMask>,
        rule: &OutlierRule,
    ) -> Result<Self> {
        let mut acc = Self {
            gt: ErrorStats::from_images(pred, gt, None, rule)?,
            ..Self::default()
        };
        if let Some(plus) = gt_plus {
            acc.gt_plus = ErrorStats::from_images(pred, plus, None, rule)?;
            acc.has_gt_plus = true;
            if let Some(mask) = edges {
                crate::depth::ensure_dims(pred.dims(), (mask.width, mask.height))?;
                acc.edge = ErrorStats::from_images(pred, plus, Some(&mask.flags), rule)?;
                acc.has_edge = true;
            }
        }
        Ok(acc)
    }

    pub fn merge(&mut self, other: &MetricsAccumulator) {
        self.gt.merge(&other.gt);
        self.gt_plus.merge(&other.gt_plus);
        self.edge.merge(&other.edge);
        self.has_gt_plus |= other.has_gt_plus;
        self.has_edge |= other.has_edge;
    }

    pub fn report(&self) -> Result<MetricsReport> {
        let g = nonempty(self.gt)?;
        Ok(MetricsReport {
            rmse: g.rmse().unwrap_or_default(),
            mae: g.mae().unwrap_or_default(),
            irmse: g.irmse().unwrap_or_default(),
            imae: g.imae().unwrap_or_default(),
            outlier_ratio: g.outlier_ratio().unwrap_or_default(),
            evaluated_pixels: g.count,
            rmse_gt_plus: if self.has_gt_plus { self.gt_plus.rmse() } else { None },
            rmse_edge: if self.has_edge { self.edge.rmse() } else { None },
        })
    }
}

/// Full metric bundle for a single frame.
pub fn evaluate(
    pred: &DepthImage,
    gt: &DepthImage,
    gt_plus: Option<&DepthImage>,
    edges: Option<&EdgeMask>,
    rule: &OutlierRule,
) -> Result<MetricsReport> {
    MetricsAccumulator::frame(pred, gt, gt_plus, edges, rule)?.report()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(px: &[Option<f64>]) -> DepthImage {
        DepthImage::from_options(px.len(), 1, px).unwrap()
    }

    #[test]
    fn identical_images_have_zero_error() {
        let a = row(&[Some(2.0), Some(3.0), None]);
        let r = rmse_mae(&a, &a).unwrap();
        assert_eq!((r.root_mean_square, r.mean_absolute, r.count), (0.0, 0.0, 2));
        let i = irmse_imae(&a, &a).unwrap();
        assert_eq!((i.root_mean_square, i.mean_absolute), (0.0, 0.0));
        assert_eq!(outlier_ratio(&a, &a, &OutlierRule::default()).unwrap(), 0.0);
    }

    #[test]
    fn two_pixel_hand_case() {
        let reference = row(&[Some(2.0), Some(4.0)]);
        let pred = row(&[Some(2.0), Some(1.0)]);
        let r = rmse_mae(&pred, &reference).unwrap();
        assert_eq!(r.mean_absolute, 1500.0);
        let expected = (3000.0f64 * 3000.0 / 2.0).sqrt();
        assert!((r.root_mean_square - expected).abs() <= 1e-9 * expected);
        assert!((r.root_mean_square - 2121.3203435596424).abs() < 1e-9);
    }

    #[test]
    fn inverse_depth_hand_case() {
        let i = irmse_imae(&row(&[Some(4.0)]), &row(&[Some(2.0)])).unwrap();
        assert!((i.mean_absolute - 250.0).abs() < 1e-12);
        assert!((i.root_mean_square - 250.0).abs() < 1e-12);
    }

    #[test]
    fn outlier_rule_cases() {
        let rule = OutlierRule::default();
        assert_eq!(outlier_ratio(&row(&[Some(14.0)]), &row(&[Some(10.0)]), &rule).unwrap(), 1.0);
        assert_eq!(outlier_ratio(&row(&[Some(102.0)]), &row(&[Some(100.0)]), &rule).unwrap(), 0.0);
        let literal = OutlierRule {
            mode: OutlierMode::DepthAndRelative,
            ..rule
        };
        // 10 m reference, 1 m error: 10% relative, depth above 3 m.
        assert_eq!(outlier_ratio(&row(&[Some(11.0)]), &row(&[Some(10.0)]), &literal).unwrap(), 1.0);
        assert_eq!(outlier_ratio(&row(&[Some(11.0)]), &row(&[Some(10.0)]), &rule).unwrap(), 0.0);
    }

    #[test]
    fn empty_evaluation_set() {
        let a = row(&[Some(1.0), None]);
        let b = row(&[None, Some(1.0)]);
        assert!(matches!(rmse_mae(&a, &b), Err(Error::EmptyEvaluationSet)));
        assert!(matches!(irmse_imae(&a, &b), Err(Error::EmptyEvaluationSet)));
        assert!(outlier_ratio(&a, &b, &OutlierRule::default()).is_err());
    }

    #[test]
    fn constant_map_has_no_edges() {
        let m = edge_mask(&DepthImage::dense(5, 4, vec![8.0; 20]).unwrap());
        assert_eq!(m.count(), 0);
    }

    #[test]
    fn single_step_flags_step_column() {
        let img = DepthImage::from_fn(8, 3, |x, _| Some(if x < 4 { 10.0 } else { 20.0 })).unwrap();
        let m = edge_mask(&img);
        for y in 0..3 {
            for x in 0..8 {
                assert_eq!(m.is_edge(x, y), x == 3);
            }
        }
    }

    #[test]
    fn rmse_edge_absent_on_empty_mask() {
        let a = DepthImage::dense(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        let mask = EdgeMask {
            width: 3,
            height: 1,
            flags: vec![false; 3],
        };
        assert_eq!(rmse_edge(&a, &a, &mask).unwrap(), None);
    }

    #[test]
    fn gt_plus_adds_sensitivity() {
        // Exact on three GT pixels, 2 m off on the one pixel GT+ adds.
        let gt = row(&[Some(5.0), Some(6.0), Some(7.0), None]);
        let plus = row(&[Some(5.0), Some(6.0), Some(7.0), Some(8.0)]);
        let pred = row(&[Some(5.0), Some(6.0), Some(7.0), Some(10.0)]);
        assert_eq!(rmse_mae(&pred, &gt).unwrap().root_mean_square, 0.0);
        let got = rmse_gt_plus(&pred, &plus).unwrap();
        assert!((got - 2000.0 / 2.0).abs() < 1e-9);
    }

    #[test]
    fn report_text_lists_every_metric() {
        let a = row(&[Some(2.0)]);
        let rep = evaluate(&a, &a, None, None, &OutlierRule::default()).unwrap();
        let text = rep.to_key_value();
        assert_eq!(text.lines().count(), 8);
        assert!(text.contains("rmse_edge_mm: n/a"));
    }
}
