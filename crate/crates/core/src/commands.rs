//! Frame and batch drivers behind the command-line tool.
//!
//! Every command works on a single file or on a directory of frames. Batches
//! run on a fixed-size worker pool; results are always reported in filename
//! order and one bad frame never aborts the run.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{frame_key, list_pngs, list_with_extension};
use crate::depth::{density, density_below, DensityStat, DepthImage, ResidualImage};
use crate::error::{Error, Result};
use crate::geometry::{
    backproject, export_ply, project_points, read_calibration, read_velodyne, subsample_scan,
    write_velodyne, Calibration, Rasterization, RangeViewConfig,
};
use crate::kitti_png::{read_depth_png, write_depth_png};
use crate::loss::{total_loss, LossConfig, LossReport};
use crate::metrics::{edge_mask, MetricsAccumulator, MetricsReport, OutlierRule};
use crate::morphology::{pseudo_depth, pseudo_ground_truth, MorphConfig};
use crate::predictor::{postprocess, BandReference, DepthPredictor, PredictionSource, ThresholdSchedule};
use crate::rectify::{build_gt_plus, rectify_sparse, RectifyConfig};

/// Settings shared by all commands. Loadable from a TOML file; missing keys take defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub morph: MorphConfig,
    pub rectify: RectifyConfig,
    pub loss: LossConfig,
    pub schedule: ThresholdSchedule,
    pub band_reference: BandReference,
    pub prediction: PredictionSource,
    pub outlier: OutlierRule,
    pub range_view: RangeViewConfig,
    /// Worker threads for batch commands; `None` lets the pool decide.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn validate(&self) -> Result<()> {
        self.morph.validate()?;
        self.rectify.validate()?;
        self.range_view.validate()
    }
}

/// Per-frame results plus the frames that could not be processed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchOutcome<T> {
    pub done: Vec<Done<T>>,
    pub failed: Vec<Failed>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Done<T> {
    pub frame: String,
    #[serde(flatten)]
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failed {
    pub frame: String,
    pub reason: String,
}

impl<T> BatchOutcome<T> {
    /// True when at least one frame succeeded.
    pub fn succeeded(&self) -> bool {
        !self.done.is_empty()
    }
}

/// Runs `f` over `items` on a pool of `threads` workers, keeping input order.
pub fn run_batch<I, T, F>(items: Vec<(String, I)>, threads: Option<usize>, f: F) -> Result<BatchOutcome<T>>
where
    I: Send + Sync,
    T: Send,
    F: Fn(&str, &I) -> Result<T> + Send + Sync,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<(String, Result<T>)> = pool.install(|| {
        items
            .par_iter()
            .map(|(key, item)| (key.clone(), f(key, item)))
            .collect()
    });
    let mut outcome = BatchOutcome {
        done: Vec::new(),
        failed: Vec::new(),
    };
    for (frame, r) in results {
        match r {
            Ok(value) => outcome.done.push(Done { frame, value }),
            Err(e) => outcome.failed.push(Failed {
                frame,
                reason: e.to_string(),
            }),
        }
    }
    Ok(outcome)
}

/// `(key, input, output)` triples for a file or a directory of PNGs.
fn png_jobs(input: &Path, output: &Path, ext: &str) -> Result<Vec<(String, (PathBuf, PathBuf))>> {
    if input.is_dir() {
        Ok(list_pngs(input)?
            .into_iter()
            .map(|(key, path)| {
                let name = Path::new(path.file_name().unwrap_or_default()).with_extension(ext);
                (key, (path.clone(), output.join(name)))
            })
            .collect())
    } else if input.is_file() {
        Ok(vec![(stem_key(input), (input.to_path_buf(), output.to_path_buf()))])
    } else {
        Err(Error::MissingFile(input.to_path_buf()))
    }
}

fn stem_key(path: &Path) -> String {
    frame_key(&path.file_stem().unwrap_or_default().to_string_lossy())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompleteStats {
    pub output: PathBuf,
    pub millis: f64,
    pub density_below_crop: f64,
    pub cloud: Option<PathBuf>,
}

/// Where and how to write point clouds alongside completed frames.
#[derive(Debug, Clone)]
pub struct CloudOutput {
    /// A file for single-frame runs, a directory for batches.
    pub path: PathBuf,
    pub calibration: Calibration,
}

/// Densifies one sparse frame and returns the dense map with its wall time in ms.
pub fn complete_frame(
    frame: &str,
    sparse: &DepthImage,
    cfg: &RunConfig,
) -> Result<(DepthImage, f64)> {
    let start = Instant::now();
    let pseudo = pseudo_depth(sparse, &cfg.morph)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let dense = match &cfg.prediction {
        PredictionSource::ZeroResidual => pseudo,
        src => src.predict(frame, sparse, &pseudo)?,
    };
    Ok((dense, elapsed))
}

pub fn run_complete(
    input: &Path,
    output: &Path,
    cfg: &RunConfig,
    cloud: Option<&CloudOutput>,
) -> Result<BatchOutcome<CompleteStats>> {
    cfg.validate()?;
    let batch = input.is_dir();
    let jobs = png_jobs(input, output, "png")?;
    run_batch(jobs, cfg.threads, |key, (src, dst)| {
        let sparse = read_depth_png(src)?;
        let (dense, millis) = complete_frame(key, &sparse, cfg)?;
        write_depth_png(dst, &dense)?;
        let cloud_path = match cloud {
            Some(c) => {
                let path = if batch {
                    c.path.join(dst.with_extension("ply").file_name().unwrap_or_default())
                } else {
                    c.path.clone()
                };
                export_ply(&backproject(&dense, &c.calibration.intrinsics), &path)?;
                Some(path)
            }
            None => None,
        };
        Ok(CompleteStats {
            output: dst.clone(),
            millis,
            density_below_crop: density_below(&dense, cfg.morph.top_crop_rows).density,
            cloud: cloud_path,
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RectifyStats {
    pub output: PathBuf,
    pub sparse: DensityStat,
    pub rectified: DensityStat,
}

pub fn run_rectify(input: &Path, output: &Path, cfg: &RunConfig) -> Result<BatchOutcome<RectifyStats>> {
    cfg.validate()?;
    run_batch(png_jobs(input, output, "png")?, cfg.threads, |_, (src, dst)| {
        let sparse = read_depth_png(src)?;
        let pseudo = pseudo_depth(&sparse, &cfg.morph)?;
        let rect = rectify_sparse(&sparse, &pseudo, &cfg.rectify)?;
        write_depth_png(dst, &rect)?;
        Ok(RectifyStats {
            output: dst.clone(),
            sparse: density(&sparse),
            rectified: density(&rect),
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GtPlusStats {
    pub output: PathBuf,
    pub gt: DensityStat,
    pub rectified: DensityStat,
    pub gt_plus: DensityStat,
}

/// Files under `dir` (or the file itself) keyed by frame.
fn keyed_inputs(path: &Path) -> Result<std::collections::BTreeMap<String, PathBuf>> {
    if path.is_dir() {
        list_pngs(path)
    } else if path.is_file() {
        Ok([(stem_key(path), path.to_path_buf())].into_iter().collect())
    } else {
        Err(Error::MissingFile(path.to_path_buf()))
    }
}

/// Keyed `(primary, secondary, output)` paths plus the frames that could not be paired.
type PairedJobs = (Vec<(String, (PathBuf, PathBuf, PathBuf))>, Vec<Failed>);

/// Pairs a primary input with a secondary one; single files pair with each other directly.
fn paired_jobs(
    primary: &Path,
    secondary: &Path,
    output: &Path,
) -> Result<PairedJobs> {
    if primary.is_file() && secondary.is_file() {
        return Ok((
            vec![(
                stem_key(primary),
                (primary.to_path_buf(), secondary.to_path_buf(), output.to_path_buf()),
            )],
            Vec::new(),
        ));
    }
    let a = keyed_inputs(primary)?;
    let mut b = keyed_inputs(secondary)?;
    let mut jobs = Vec::new();
    let mut missing = Vec::new();
    for (key, p) in a {
        match b.remove(&key) {
            Some(s) => {
                let name = p.file_name().unwrap_or_default().to_owned();
                jobs.push((key, (p, s, output.join(name))));
            }
            None => missing.push(Failed {
                frame: key,
                reason: format!("no counterpart in {}", secondary.display()),
            }),
        }
    }
    for key in b.into_keys() {
        missing.push(Failed {
            frame: key,
            reason: format!("no counterpart in {}", primary.display()),
        });
    }
    Ok((jobs, missing))
}

pub fn run_gtplus(gt: &Path, sparse: &Path, output: &Path, cfg: &RunConfig) -> Result<BatchOutcome<GtPlusStats>> {
    cfg.validate()?;
    let (jobs, missing) = paired_jobs(gt, sparse, output)?;
    let mut out = run_batch(jobs, cfg.threads, |_, (g, s, dst)| {
        let gt = read_depth_png(g)?;
        let sparse = read_depth_png(s)?;
        let pseudo = pseudo_depth(&sparse, &cfg.morph)?;
        let rect = rectify_sparse(&sparse, &pseudo, &cfg.rectify)?;
        let plus = build_gt_plus(&gt, &rect)?;
        write_depth_png(dst, &plus)?;
        Ok(GtPlusStats {
            output: dst.clone(),
            gt: density(&gt),
            rectified: density(&rect),
            gt_plus: density(&plus),
        })
    })?;
    out.failed.extend(missing);
    out.failed.sort_by(|a, b| a.frame.cmp(&b.frame));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostprocessStats {
    pub output: PathBuf,
    pub input_pixels: usize,
    pub retained_pixels: usize,
    pub retained_fraction: f64,
}

pub fn run_postprocess(
    pred: &Path,
    sparse: &Path,
    output: &Path,
    cfg: &RunConfig,
) -> Result<BatchOutcome<PostprocessStats>> {
    cfg.validate()?;
    let (jobs, missing) = paired_jobs(pred, sparse, output)?;
    let mut out = run_batch(jobs, cfg.threads, |_, (p, s, dst)| {
        let pred = read_depth_png(p)?;
        let pseudo = pseudo_depth(&read_depth_png(s)?, &cfg.morph)?;
        let kept = postprocess(&pred, &pseudo, &cfg.schedule, cfg.band_reference)?;
        write_depth_png(dst, &kept)?;
        let (n, k) = (pred.valid_count(), kept.valid_count());
        Ok(PostprocessStats {
            output: dst.clone(),
            input_pixels: n,
            retained_pixels: k,
            retained_fraction: if n == 0 { 0.0 } else { k as f64 / n as f64 },
        })
    })?;
    out.failed.extend(missing);
    out.failed.sort_by(|a, b| a.frame.cmp(&b.frame));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub pred_dir: Option<PathBuf>,
    pub gt_dir: PathBuf,
    pub sparse_dir: PathBuf,
    /// Also compute the training losses of each prediction.
    pub with_loss: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameEval {
    pub metrics: MetricsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<LossReport>,
    #[serde(skip)]
    pub stats: MetricsAccumulator,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalOutcome {
    pub frames: Vec<Done<FrameEval>>,
    pub skipped: Vec<Failed>,
    /// Pooled over every evaluated pixel of every frame.
    pub aggregate: Option<MetricsReport>,
}

/// Evaluates one frame against GT, GT+ and the pseudo-depth edge mask.
pub fn evaluate_frame(
    frame: &str,
    sparse: &DepthImage,
    gt: &DepthImage,
    source: &impl DepthPredictor,
    cfg: &RunConfig,
    with_loss: bool,
) -> Result<FrameEval> {
    sparse.ensure_same_dims(gt)?;
    let pseudo = pseudo_depth(sparse, &cfg.morph)?;
    let pred = source.predict(frame, sparse, &pseudo)?;
    let rect = rectify_sparse(sparse, &pseudo, &cfg.rectify)?;
    let plus = build_gt_plus(gt, &rect)?;
    let edges = edge_mask(&pseudo);
    let stats = MetricsAccumulator::frame(&pred, gt, Some(&plus), Some(&edges), &cfg.outlier)?;
    let loss = if with_loss {
        let pseudo_gt = pseudo_ground_truth(gt, &cfg.morph)?;
        // Rows without a pseudo depth carry no residual.
        let residual = ResidualImage::between(&pred, &pseudo)?;
        let loss_cfg = LossConfig {
            top_crop_rows: cfg.loss.top_crop_rows.max(cfg.morph.top_crop_rows),
            ..cfg.loss
        };
        Some(total_loss(gt, &pseudo_gt, &pseudo, &residual, &loss_cfg)?)
    } else {
        None
    };
    Ok(FrameEval {
        metrics: stats.report()?,
        loss,
        stats,
    })
}

pub fn run_eval(opts: &EvalOptions, cfg: &RunConfig) -> Result<EvalOutcome> {
    cfg.validate()?;
    let source = match &opts.pred_dir {
        Some(dir) => PredictionSource::ExternalFiles { dir: dir.clone() },
        None => cfg.prediction.clone(),
    };
    let (jobs, missing) = paired_jobs(&opts.sparse_dir, &opts.gt_dir, Path::new(""))?;
    let preds = match &source {
        PredictionSource::ExternalFiles { dir } => Some(list_pngs(dir)?),
        PredictionSource::ZeroResidual => None,
    };
    let mut skipped = missing;
    let jobs: Vec<_> = jobs
        .into_iter()
        .filter_map(|(key, (s, g, _))| match &preds {
            Some(p) if !p.contains_key(&key) => {
                skipped.push(Failed {
                    frame: key,
                    reason: "no prediction file".into(),
                });
                None
            }
            _ => {
                let pred = preds.as_ref().and_then(|p| p.get(&key).cloned());
                Some((key, (s, g, pred)))
            }
        })
        .collect();
    let batch = run_batch(jobs, cfg.threads, |key, (s, g, p)| {
        let sparse = read_depth_png(s)?;
        let gt = read_depth_png(g)?;
        match p {
            Some(path) => {
                let pred = read_depth_png(path)?;
                evaluate_frame(key, &sparse, &gt, &Fixed(pred), cfg, opts.with_loss)
            }
            None => evaluate_frame(key, &sparse, &gt, &source, cfg, opts.with_loss),
        }
    })?;
    skipped.extend(batch.failed);
    skipped.sort_by(|a, b| a.frame.cmp(&b.frame));

    let mut pooled = MetricsAccumulator::default();
    for f in &batch.done {
        pooled.merge(&f.value.stats);
    }
    let aggregate = if batch.done.is_empty() {
        None
    } else {
        pooled.report().ok()
    };
    Ok(EvalOutcome {
        frames: batch.done,
        skipped,
        aggregate,
    })
}

/// A prediction already loaded from disk.
struct Fixed(DepthImage);

impl DepthPredictor for Fixed {
    fn predict(&self, _: &str, _: &DepthImage, pseudo: &DepthImage) -> Result<DepthImage> {
        self.0.ensure_same_dims(pseudo)?;
        Ok(self.0.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleOptions {
    pub scan_dir: PathBuf,
    pub out_dir: PathBuf,
    pub keep_every: usize,
    pub calibration: Calibration,
    /// `(width, height)` of the projected depth images.
    pub image_size: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsampleStats {
    pub points_in: usize,
    pub points_out: usize,
    pub density_full: f64,
    pub density_subsampled: f64,
}

/// Writes `velodyne/<name>.bin` and `depth/<name>.png` for every scan in `scan_dir`.
pub fn run_subsample(opts: &SubsampleOptions, cfg: &RunConfig) -> Result<BatchOutcome<SubsampleStats>> {
    cfg.validate()?;
    let velo_to_cam = opts.calibration.velo_to_cam.ok_or_else(|| {
        Error::Calibration("calibration lacks a LiDAR-to-camera transform".into())
    })?;
    let scans: Vec<_> = if opts.scan_dir.is_dir() {
        list_with_extension(&opts.scan_dir, "bin")?.into_iter().collect()
    } else {
        vec![(stem_key(&opts.scan_dir), opts.scan_dir.clone())]
    };
    let k = opts.calibration.intrinsics;
    run_batch(scans, cfg.threads, |_, path| {
        let cloud = read_velodyne(path)?;
        let sub = subsample_scan(&cloud, opts.keep_every, &cfg.range_view)?;
        let name = Path::new(path.file_stem().unwrap_or_default());
        write_velodyne(opts.out_dir.join("velodyne").join(name.with_extension("bin")), &sub)?;
        let full = project_points(&cloud, &k, &velo_to_cam, opts.image_size, Rasterization::ZBuffer)?;
        let depth = project_points(&sub, &k, &velo_to_cam, opts.image_size, Rasterization::ZBuffer)?;
        write_depth_png(opts.out_dir.join("depth").join(name.with_extension("png")), &depth)?;
        Ok(SubsampleStats {
            points_in: cloud.len(),
            points_out: sub.len(),
            density_full: density(&full).density,
            density_subsampled: density(&depth).density,
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloudStats {
    pub output: PathBuf,
    pub points: usize,
}

pub fn run_cloud(input: &Path, output: &Path, calibration: &Calibration, cfg: &RunConfig) -> Result<BatchOutcome<CloudStats>> {
    run_batch(png_jobs(input, output, "ply")?, cfg.threads, |_, (src, dst)| {
        let cloud = backproject(&read_depth_png(src)?, &calibration.intrinsics);
        export_ply(&cloud, dst)?;
        Ok(CloudStats {
            output: dst.clone(),
            points: cloud.len(),
        })
    })
}

/// Loads a calibration from one or more files.
pub fn load_calibration(paths: &[PathBuf]) -> Result<Calibration> {
    read_calibration(paths)
}
