use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pseudo_depth::commands::{
    self, BatchOutcome, CloudOutput, EvalOptions, RunConfig, SubsampleOptions,
};
use pseudo_depth::dataset::{DatasetLayout, DATA_ROOT_ENV};
use pseudo_depth::metrics::OutlierMode;
use pseudo_depth::morphology::Blur;
use pseudo_depth::predictor::{BandReference, PredictionSource, ThresholdSchedule, DYNAMIC_SCHEDULE};
use pseudo_depth::Error;

#[derive(Parser)]
#[command(name = "pseudo-depth", version, about = "Pseudo-depth guided LiDAR depth completion tools")]
struct Cli {
    /// TOML config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for batch runs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write the report as JSON to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(flatten)]
    morph: MorphArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MorphArgs {
    /// Top rows left empty in pseudo depth maps and ignored by the losses.
    #[arg(long, global = true)]
    crop_rows: Option<usize>,
    /// Range bound in meters for densification.
    #[arg(long, global = true)]
    ceiling: Option<f64>,
    /// Apply a median blur of this (odd) size after hole filling.
    #[arg(long, global = true)]
    median: Option<usize>,
    /// Rectification threshold in meters.
    #[arg(long, global = true)]
    rectify_threshold: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Densify sparse depth PNGs (file or directory).
    Complete {
        sparse: PathBuf,
        out: PathBuf,
        /// Directory of externally predicted depth PNGs to emit instead of the pseudo map.
        #[arg(long)]
        pred_dir: Option<PathBuf>,
        /// Also write a PLY point cloud (file, or directory for batches). Needs --calib.
        #[arg(long)]
        emit_cloud: Option<PathBuf>,
        #[arg(long, num_args = 1..)]
        calib: Vec<PathBuf>,
    },
    /// Remove penetration points from sparse depth.
    Rectify { sparse: PathBuf, out: PathBuf },
    /// Complement ground truth with rectified sparse depth.
    Gtplus { gt: PathBuf, sparse: PathBuf, out: PathBuf },
    /// Evaluate predictions (or the pseudo-depth baseline) against GT, GT+ and edges.
    Eval {
        /// Prediction directory; omitted means the zero-residual baseline.
        #[arg(long)]
        pred: Option<PathBuf>,
        #[arg(long)]
        gt: Option<PathBuf>,
        #[arg(long)]
        sparse: Option<PathBuf>,
        /// Dataset root; defaults to $PSEUDO_DEPTH_DATA_ROOT.
        #[arg(long, env = DATA_ROOT_ENV)]
        root: Option<PathBuf>,
        /// Outlier rule: `error` (|err| > 3 m and rel > 5%) or `depth` (depth > 3 m and rel > 5%).
        #[arg(long)]
        outlier_mode: Option<String>,
        /// Also report the training losses of each prediction.
        #[arg(long)]
        losses: bool,
        /// Print only the aggregate.
        #[arg(long)]
        quiet: bool,
    },
    /// Strip prediction pixels that disagree with the pseudo map.
    Postprocess {
        pred: PathBuf,
        sparse: PathBuf,
        out: PathBuf,
        /// Bands as `upper:threshold` in meters, `dynamic`, or `global:<t>` (presets 10, 5, 3, 1).
        #[arg(long, default_value = DYNAMIC_SCHEDULE)]
        schedule: String,
        /// Depth that selects the band: `predicted` or `pseudo`.
        #[arg(long, default_value = "predicted")]
        band_reference: String,
    },
    /// Emulate sparser LiDARs by dropping range-view rows, then re-project.
    Subsample {
        scans: PathBuf,
        out: PathBuf,
        /// 2 for 32 lines, 4 for 16 lines.
        #[arg(long, default_value_t = 2)]
        keep_every: usize,
        #[arg(long, required = true, num_args = 1..)]
        calib: Vec<PathBuf>,
        #[arg(long, default_value_t = 1242)]
        width: usize,
        #[arg(long, default_value_t = 375)]
        height: usize,
    },
    /// Back-project depth PNGs to PLY point clouds.
    Cloud {
        depth: PathBuf,
        out: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        calib: Vec<PathBuf>,
    },
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    let m = &cli.morph;
    if let Some(r) = m.crop_rows {
        cfg.morph.top_crop_rows = r;
        cfg.loss.top_crop_rows = r;
    }
    if let Some(c) = m.ceiling {
        cfg.morph.inversion_ceiling = c;
    }
    if let Some(size) = m.median {
        cfg.morph.blur = Blur::Median { size };
    }
    if let Some(t) = m.rectify_threshold {
        cfg.rectify.threshold = t;
    }
    Ok(cfg)
}

fn write_report<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), Error> {
    if let Some(path) = path {
        let json = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(path, json).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
    }
    Ok(())
}

fn finish<T: Serialize>(
    outcome: &BatchOutcome<T>,
    report: Option<&Path>,
    line: impl Fn(&T) -> String,
) -> Result<bool, Error> {
    for d in &outcome.done {
        println!("{}: {}", d.frame, line(&d.value));
    }
    for f in &outcome.failed {
        eprintln!("skipped {}: {}", f.frame, f.reason);
    }
    write_report(report, outcome)?;
    Ok(outcome.succeeded())
}

fn run(cli: Cli) -> Result<bool, Error> {
    let mut cfg = build_config(&cli)?;
    let report = cli.report.as_deref();
    match cli.command {
        Command::Complete {
            sparse,
            out,
            pred_dir,
            emit_cloud,
            calib,
        } => {
            if let Some(dir) = pred_dir {
                cfg.prediction = PredictionSource::ExternalFiles { dir };
            }
            let cloud = match emit_cloud {
                Some(path) if calib.is_empty() => {
                    return Err(Error::Config(format!(
                        "--emit-cloud {} needs --calib",
                        path.display()
                    )))
                }
                Some(path) => Some(CloudOutput {
                    path,
                    calibration: commands::load_calibration(&calib)?,
                }),
                None => None,
            };
            let outcome = commands::run_complete(&sparse, &out, &cfg, cloud.as_ref())?;
            finish(&outcome, report, |s| {
                format!(
                    "{:.2} ms, density below crop {:.4} -> {}",
                    s.millis,
                    s.density_below_crop,
                    s.output.display()
                )
            })
        }
        Command::Rectify { sparse, out } => {
            let outcome = commands::run_rectify(&sparse, &out, &cfg)?;
            finish(&outcome, report, |s| {
                format!(
                    "density {:.4}% -> {:.4}%",
                    100.0 * s.sparse.density,
                    100.0 * s.rectified.density
                )
            })
        }
        Command::Gtplus { gt, sparse, out } => {
            let outcome = commands::run_gtplus(&gt, &sparse, &out, &cfg)?;
            finish(&outcome, report, |s| {
                format!(
                    "density gt {:.4}% -> gt+ {:.4}%",
                    100.0 * s.gt.density,
                    100.0 * s.gt_plus.density
                )
            })
        }
        Command::Eval {
            pred,
            gt,
            sparse,
            root,
            outlier_mode,
            losses,
            quiet,
        } => {
            if let Some(mode) = outlier_mode {
                cfg.outlier.mode = match mode.as_str() {
                    "error" => OutlierMode::ErrorAndRelative,
                    "depth" => OutlierMode::DepthAndRelative,
                    other => return Err(Error::Config(format!("unknown outlier mode {other}"))),
                };
            }
            let layout = match &root {
                Some(r) => Some(DatasetLayout::from_root(r)?),
                None => None,
            };
            let sparse_dir = sparse
                .or_else(|| layout.as_ref().map(|l| l.sparse_dir.clone()))
                .ok_or_else(|| Error::Config("--sparse or a dataset root is required".into()))?;
            let gt_dir = gt
                .or_else(|| layout.as_ref().and_then(|l| l.gt_dir.clone()))
                .ok_or_else(|| Error::Config("--gt or a dataset root with ground truth is required".into()))?;
            let opts = EvalOptions {
                pred_dir: pred,
                gt_dir,
                sparse_dir,
                with_loss: losses,
            };
            let outcome = commands::run_eval(&opts, &cfg)?;
            if !quiet {
                for f in &outcome.frames {
                    let m = &f.value.metrics;
                    println!(
                        "{}: rmse {:.2} mae {:.2} irmse {:.3} imae {:.3} outliers {:.4} rmse_gt+ {} rmse_edge {}",
                        f.frame,
                        m.rmse,
                        m.mae,
                        m.irmse,
                        m.imae,
                        m.outlier_ratio,
                        m.rmse_gt_plus.map_or("n/a".into(), |v| format!("{v:.2}")),
                        m.rmse_edge.map_or("n/a".into(), |v| format!("{v:.2}")),
                    );
                    if let Some(l) = &f.value.loss {
                        println!("  loss: depth {:.6} grad {:.6} ssim {:.6} total {:.6}", l.l_depth, l.l_grad, l.l_ssim, l.l_total);
                    }
                }
            }
            for s in &outcome.skipped {
                eprintln!("skipped {}: {}", s.frame, s.reason);
            }
            if let Some(agg) = &outcome.aggregate {
                println!("aggregate over {} frames", outcome.frames.len());
                println!("{agg}");
            }
            write_report(report, &outcome)?;
            Ok(outcome.aggregate.is_some())
        }
        Command::Postprocess {
            pred,
            sparse,
            out,
            schedule,
            band_reference,
        } => {
            cfg.schedule = schedule.parse::<ThresholdSchedule>()?;
            cfg.band_reference = match band_reference.as_str() {
                "predicted" => BandReference::Predicted,
                "pseudo" => BandReference::Pseudo,
                other => return Err(Error::Config(format!("unknown band reference {other}"))),
            };
            let outcome = commands::run_postprocess(&pred, &sparse, &out, &cfg)?;
            finish(&outcome, report, |s| {
                format!(
                    "retained {}/{} ({:.2}%)",
                    s.retained_pixels,
                    s.input_pixels,
                    100.0 * s.retained_fraction
                )
            })
        }
        Command::Subsample {
            scans,
            out,
            keep_every,
            calib,
            width,
            height,
        } => {
            let opts = SubsampleOptions {
                scan_dir: scans,
                out_dir: out,
                keep_every,
                calibration: commands::load_calibration(&calib)?,
                image_size: (width, height),
            };
            let outcome = commands::run_subsample(&opts, &cfg)?;
            finish(&outcome, report, |s| {
                format!(
                    "{} -> {} points, density {:.4}% -> {:.4}%",
                    s.points_in,
                    s.points_out,
                    100.0 * s.density_full,
                    100.0 * s.density_subsampled
                )
            })
        }
        Command::Cloud { depth, out, calib } => {
            let calibration = commands::load_calibration(&calib)?;
            let outcome = commands::run_cloud(&depth, &out, &calibration, &cfg)?;
            finish(&outcome, report, |s| format!("{} points -> {}", s.points, s.output.display()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("no frame was processed successfully");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
