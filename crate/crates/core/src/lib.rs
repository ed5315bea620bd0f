//! Pseudo-depth guided LiDAR depth completion toolkit.
//!
//! The crate covers the classical parts of a residual depth-completion
//! pipeline:
//!
//! - [`morphology`]: dense pseudo depth from sparse LiDAR by fast morphology;
//! - [`rectify`]: removal of penetration points and the complemented ground truth (GT+);
//! - [`metrics`]: RMSE/MAE/iRMSE/iMAE, KITTI outliers, RMSE against GT+ and on edges;
//! - [`loss`]: reference depth, gradient and SSIM losses for residual training;
//! - [`predictor`]: prediction sources and threshold-schedule post-processing;
//! - [`geometry`]: pinhole projection, point clouds, PLY, velodyne scans, range-view subsampling;
//! - [`kitti_png`] and [`dataset`]: KITTI file formats and directory layouts.
//!
//! ```
//! use pseudo_depth::{pseudo_depth, rectify_sparse, DepthImage, MorphConfig, RectifyConfig};
//!
//! let sparse = DepthImage::from_fn(16, 8, |x, y| ((x + 2 * y) % 5 == 0).then_some(10.0 + x as f64))?;
//! let cfg = MorphConfig::default().uncropped();
//! let pseudo = pseudo_depth(&sparse, &cfg)?;
//! assert_eq!(pseudo.valid_count(), 16 * 8);
//! let rectified = rectify_sparse(&sparse, &pseudo, &RectifyConfig::default())?;
//! assert!(rectified.valid_count() <= sparse.valid_count());
//! # Ok::<(), pseudo_depth::Error>(())
//! ```

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod dataset;
pub mod depth;
pub mod error;
pub mod geometry;
pub mod kitti_png;
pub mod loss;
pub mod metrics;
pub mod morphology;
pub mod predictor;
pub mod rectify;

pub use depth::{density, density_below, DensityStat, DepthImage, ResidualImage};
pub use error::{Error, Result};
pub use kitti_png::{decode_depth_png, encode_depth_png, read_depth_png, write_depth_png};
pub use loss::{depth_loss, grad_loss, ssim_loss, total_loss, LossConfig, LossReport};
pub use metrics::{
    edge_mask, evaluate, irmse_imae, outlier_ratio, rmse_edge, rmse_gt_plus, rmse_mae, EdgeMask,
    MetricsReport, OutlierRule,
};
pub use morphology::{gradient_magnitude, pseudo_depth, pseudo_ground_truth, MorphConfig};
pub use predictor::{postprocess, predict_dense, PredictionSource, ThresholdSchedule};
pub use rectify::{build_gt_plus, rectify_sparse, RectifyConfig};
