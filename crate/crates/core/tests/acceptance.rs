//! Acceptance checks. Run with
//! `cargo test -p pseudo-depth --test acceptance -- --nocapture`;
//! prints one PASS/FAIL line per criterion and exits non-zero on any failure.
//!
//! Real KITTI frames are included in the format and rectification checks when
//! `PSEUDO_DEPTH_DATA_ROOT` points at a depth-completion root.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::Point3;
use rand::Rng;

use common::oracle::pseudo_depth_oracle;
use pseudo_depth::dataset::{DatasetLayout, DATA_ROOT_ENV};
use pseudo_depth::geometry::{
    backproject, project_points, read_ply, write_ply, CameraIntrinsics, PointCloud, Rasterization,
    RigidTransform,
};
use pseudo_depth::kitti_png::{decode_codes, encode_codes, DepthCodes};
use pseudo_depth::loss::{depth_loss, grad_loss, ssim_loss, total_loss, LossConfig};
use pseudo_depth::metrics::{edge_mask, rmse_mae};
use pseudo_depth::predictor::{postprocess, predict_dense, BandReference, PredictionSource, ThresholdSchedule};
use pseudo_depth::{
    build_gt_plus, density, density_below, pseudo_depth, read_depth_png, rectify_sparse, write_depth_png,
    DepthImage, MorphConfig, RectifyConfig, ResidualImage,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

fn real_frames(limit: usize) -> Vec<(PathBuf, Option<PathBuf>)> {
    let Some(root) = std::env::var_os(DATA_ROOT_ENV) else {
        return Vec::new();
    };
    let Ok(layout) = DatasetLayout::from_root(&PathBuf::from(root)) else {
        return Vec::new();
    };
    layout
        .frames()
        .unwrap_or_default()
        .into_iter()
        .take(limit)
        .map(|f| (f.sparse, f.gt))
        .collect()
}

fn format_round_trips() -> Check {
    let mut rng = common::rng(1);
    for i in 0..100 {
        let (w, h) = (rng.random_range(1..200), rng.random_range(1..120));
        let codes = DepthCodes {
            width: w,
            height: h,
            codes: (0..w * h)
                .map(|_| if rng.random_bool(0.6) { 0 } else { rng.random() })
                .collect(),
        };
        let back = decode_codes(&encode_codes(&codes).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure!(back == codes, "image {i} ({w}x{h}) differs after round trip");
    }
    let real = real_frames(20);
    for (sparse, _) in &real {
        let bytes = fs::read(sparse).map_err(|e| e.to_string())?;
        let codes = decode_codes(&bytes).map_err(|e| e.to_string())?;
        let again = decode_codes(&encode_codes(&codes).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure!(again == codes, "{} differs after round trip", sparse.display());
    }
    for n in [0usize, 1, 1000] {
        let pts = (0..n)
            .map(|_| Point3::new(rng.random_range(-80.0..80.0), rng.random_range(-80.0..80.0), rng.random_range(-3.0..3.0)))
            .collect();
        let cloud = PointCloud::with_intensity(pts, (0..n).map(|_| rng.random()).collect()).map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        write_ply(&cloud, &mut buf).map_err(|e| e.to_string())?;
        ensure!(read_ply(&buf).map_err(|e| e.to_string())? == cloud, "PLY with {n} points differs");
    }
    Ok(format!("100 synthetic PNGs, {} real frames, 3 PLY clouds bit-exact", real.len()))
}

fn morphology_oracle() -> Check {
    let mut rng = common::rng(2);
    let cases = 1500;
    for i in 0..cases {
        let (w, h) = (rng.random_range(1..=16), rng.random_range(1..=16));
        let density = rng.random_range(0.05..=0.5);
        let sparse = common::random_sparse(&mut rng, w, h, density, 0.5, 99.0);
        let cfg = MorphConfig {
            top_crop_rows: rng.random_range(0..=h / 2),
            ..MorphConfig::default()
        };
        let got = pseudo_depth(&sparse, &cfg).ok();
        let want = pseudo_depth_oracle(&sparse, &cfg);
        ensure!(got == want, "case {i} ({w}x{h}, density {density:.2}) disagrees with the oracle");
    }
    Ok(format!("{cases} random images up to 16x16 match pixel-for-pixel"))
}

fn coverage() -> Check {
    let mut rng = common::rng(3);
    let mut n = 0;
    for _ in 0..1000 {
        let (w, h) = (rng.random_range(1..=40), rng.random_range(2..=40));
        let crop = rng.random_range(0..h);
        let density = rng.random_range(0.001..0.5);
        let sparse = common::random_sparse_nonempty(&mut rng, w, h, crop, density);
        let cfg = MorphConfig { top_crop_rows: crop, ..MorphConfig::default() };
        let dense = pseudo_depth(&sparse, &cfg).map_err(|e| e.to_string())?;
        ensure!(density_below(&dense, crop).density == 1.0, "hole left in a {w}x{h} image with crop {crop}");
        n += 1;
    }
    let frame = common::synthetic_kitti_frame(3);
    let dense = pseudo_depth(&frame, &MorphConfig::default()).map_err(|e| e.to_string())?;
    ensure!(density_below(&dense, 100).density == 1.0, "hole left in the 1216x352 frame");
    Ok(format!("density 1.0 below the crop on {} inputs", n + 1))
}

fn metric_identities() -> Check {
    let mut rng = common::rng(4);
    for i in 0..1000 {
        let a = common::random_sparse_nonempty(&mut rng, 12, 9, 0, 0.6);
        let b = common::random_dense(&mut rng, 12, 9, 0.5, 90.0);
        let r = rmse_mae(&b, &a).map_err(|e| e.to_string())?;
        ensure!(r.root_mean_square >= r.mean_absolute, "pair {i}: RMSE {} < MAE {}", r.root_mean_square, r.mean_absolute);
    }
    for offset in [0.001, 0.25, 1.0, 7.5] {
        let gt = common::random_sparse_nonempty(&mut rng, 20, 10, 0, 0.4);
        let pred = DepthImage::from_fn(20, 10, |x, y| gt.get(x, y).map(|d| d + offset)).map_err(|e| e.to_string())?;
        let r = rmse_mae(&pred, &gt).map_err(|e| e.to_string())?;
        let want = offset * 1000.0;
        ensure!(rel_close(r.root_mean_square, want, 1e-9), "offset {offset}: RMSE {}", r.root_mean_square);
        ensure!(rel_close(r.mean_absolute, want, 1e-9), "offset {offset}: MAE {}", r.mean_absolute);
    }
    // Errors of 1 m and 2 m: MAE 1500 mm, RMSE sqrt((1e6 + 4e6) / 2) mm.
    let gt = DepthImage::dense(2, 1, vec![10.0, 20.0]).map_err(|e| e.to_string())?;
    let pred = DepthImage::dense(2, 1, vec![11.0, 18.0]).map_err(|e| e.to_string())?;
    let r = rmse_mae(&pred, &gt).map_err(|e| e.to_string())?;
    ensure!(rel_close(r.mean_absolute, 1500.0, 1e-9), "2-pixel MAE {}", r.mean_absolute);
    ensure!(rel_close(r.root_mean_square, 2_500_000f64.sqrt(), 1e-9), "2-pixel RMSE {}", r.root_mean_square);
    // Errors of 3 m and 0 m: MAE 1500 mm, RMSE sqrt(9e6 / 2) mm.
    let pred = DepthImage::dense(2, 1, vec![13.0, 20.0]).map_err(|e| e.to_string())?;
    let r = rmse_mae(&pred, &gt).map_err(|e| e.to_string())?;
    ensure!(rel_close(r.mean_absolute, 1500.0, 1e-9), "2-pixel MAE {}", r.mean_absolute);
    ensure!(rel_close(r.root_mean_square, 2121.3203435596424, 1e-9), "2-pixel RMSE {}", r.root_mean_square);
    Ok("RMSE >= MAE on 1000 pairs; offsets and 2-pixel cases within 1e-9".into())
}

/// Edge flags computed directly: forward differences, replicated border,
/// strict comparison with the mean over the image.
fn edge_oracle(img: &DepthImage) -> Vec<bool> {
    let (w, h) = img.dims();
    let v = |x: usize, y: usize| img.get(x, y).unwrap();
    let g: Vec<f64> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (y, x)))
        .map(|(y, x)| (v((x + 1).min(w - 1), y) - v(x, y)).abs() + (v(x, (y + 1).min(h - 1)) - v(x, y)).abs())
        .collect();
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    g.iter().map(|&x| x > mean).collect()
}

fn edge_mask_property() -> Check {
    for (w, h, d) in [(1, 1, 3.0), (16, 9, 12.5), (40, 30, 80.0)] {
        let img = DepthImage::dense(w, h, vec![d; w * h]).map_err(|e| e.to_string())?;
        ensure!(edge_mask(&img).count() == 0, "constant {w}x{h} image has edges");
    }
    let mut checked = 0;
    for (w, h) in [(8, 5), (20, 12), (64, 7)] {
        for step in 1..w {
            let img = DepthImage::from_fn(w, h, |x, _| Some(if x < step { 10.0 } else { 25.0 })).map_err(|e| e.to_string())?;
            let mask = edge_mask(&img);
            let oracle = edge_oracle(&img);
            ensure!(mask.flags == oracle, "{w}x{h} step at column {step} disagrees with the oracle");
            for y in 0..h {
                for x in 0..w {
                    ensure!(mask.is_edge(x, y) == (x == step - 1), "{w}x{h} step {step}: flag at ({x},{y})");
                }
            }
            checked += 1;
        }
    }
    Ok(format!("constant images empty; {checked} step images flag exactly the step column"))
}

fn loss_identities() -> Check {
    let mut rng = common::rng(6);
    let cfg = LossConfig { ssim_window: 5, ..LossConfig::default().full_frame() };
    for i in 0..200 {
        let (w, h) = (rng.random_range(5..24), rng.random_range(5..24));
        // Far enough from zero that pseudo + residual stays a valid depth.
        let pseudo = common::random_dense(&mut rng, w, h, 3.0, 80.0);
        let residual: Vec<f64> = (0..w * h).map(|_| rng.random_range(-2.0..2.0)).collect();
        let r = ResidualImage::new(w, h, residual.clone()).map_err(|e| e.to_string())?;
        let truth = r.compose(&pseudo).map_err(|e| e.to_string())?;
        let perfect = total_loss(&truth, &truth, &pseudo, &r, &cfg).map_err(|e| e.to_string())?;
        for (name, v) in [("depth", perfect.l_depth), ("grad", perfect.l_grad), ("ssim", perfect.l_ssim), ("total", perfect.l_total)] {
            ensure!(v.abs() <= 1e-12, "case {i}: perfect prediction {name} loss {v}");
        }

        let pgt = common::random_dense(&mut rng, w, h, 1.0, 80.0);
        let c = rng.random_range(-5.0..5.0);
        let shifted = ResidualImage::new(w, h, residual.iter().map(|x| x + c).collect()).map_err(|e| e.to_string())?;
        let g0 = grad_loss(&pgt, &pseudo, &r, &cfg).map_err(|e| e.to_string())?;
        let g1 = grad_loss(&pgt, &pseudo, &shifted, &cfg).map_err(|e| e.to_string())?;
        ensure!((g0 - g1).abs() <= 1e-12, "case {i}: grad loss changed by {} under a shift", g0 - g1);

        let zero = ResidualImage::zeros(w, h).map_err(|e| e.to_string())?;
        let same = ssim_loss(&pgt, &pgt, &zero, &cfg).map_err(|e| e.to_string())?;
        ensure!(same.abs() <= 1e-12, "case {i}: ssim_loss(x, x) = {same}");
        let s = ssim_loss(&pgt, &pseudo, &r, &cfg).map_err(|e| e.to_string())?;
        ensure!((0.0..=1.0).contains(&s), "case {i}: ssim loss {s} outside [0, 1]");

        let gt = common::random_sparse_nonempty(&mut rng, w, h, 0, 0.3);
        let base = depth_loss(&gt, &pseudo, &r, &cfg).map_err(|e| e.to_string())?;
        let valid: Vec<usize> = (0..w * h).filter(|&j| gt.at(j).is_some()).collect();
        let j = valid[rng.random_range(0..valid.len())];
        let eps = 1e-3;
        let e_j = gt.at(j).unwrap() - pseudo.at(j).unwrap() - residual[j];
        let mut nudged = residual.clone();
        nudged[j] -= eps;
        let nudged = ResidualImage::new(w, h, nudged).map_err(|e| e.to_string())?;
        let after = depth_loss(&gt, &pseudo, &nudged, &cfg).map_err(|e| e.to_string())?;
        let want = (2.0 * e_j * eps + eps * eps) / valid.len() as f64;
        ensure!((after - base - want).abs() <= 1e-9, "case {i}: perturbation {} vs {want}", after - base);
    }
    Ok("perfect = 0, shift invariance, ssim(x,x) = 0 and bounds, quadratic perturbation on 200 cases".into())
}

fn rectification_gt_plus() -> Check {
    let mut rng = common::rng(7);
    let cfg = MorphConfig { top_crop_rows: 2, ..MorphConfig::default() };
    let rect_cfg = RectifyConfig::default();
    for i in 0..1000 {
        let (w, h) = (rng.random_range(4..24), rng.random_range(4..24));
        let (ds, dg) = (rng.random_range(0.05..0.4), rng.random_range(0.0..0.6));
        let sparse = common::random_sparse_nonempty(&mut rng, w, h, 2, ds);
        let gt = common::random_sparse(&mut rng, w, h, dg, 0.5, 90.0);
        let pseudo = pseudo_depth(&sparse, &cfg).map_err(|e| e.to_string())?;
        let rect = rectify_sparse(&sparse, &pseudo, &rect_cfg).map_err(|e| e.to_string())?;
        let plus = build_gt_plus(&gt, &rect).map_err(|e| e.to_string())?;
        for p in 0..sparse.len() {
            if let Some(d) = rect.at(p) {
                ensure!(sparse.at(p).map(f64::to_bits) == Some(d.to_bits()), "triple {i}: rectified value changed at {p}");
            }
            match (gt.at(p), rect.at(p), plus.at(p)) {
                (Some(g), _, got) => ensure!(got == Some(g), "triple {i}: GT not kept at {p}"),
                (None, Some(r), got) => ensure!(got == Some(r), "triple {i}: rectified point not used at {p}"),
                (None, None, got) => ensure!(got.is_none(), "triple {i}: invented a value at {p}"),
            }
        }
        let (ds, dr, dg, dp) = (density(&sparse).density, density(&rect).density, density(&gt).density, density(&plus).density);
        ensure!(dr <= ds, "triple {i}: rectified denser than sparse");
        ensure!(dp >= dg && dp >= dr && dp <= dg + dr + 1e-12, "triple {i}: GT+ density out of order");
    }
    let real = real_frames(20);
    let (mut before, mut after) = (0usize, 0usize);
    for (sparse, _) in &real {
        let s = read_depth_png(sparse).map_err(|e| e.to_string())?;
        let p = pseudo_depth(&s, &MorphConfig::default()).map_err(|e| e.to_string())?;
        before += s.valid_count();
        after += rectify_sparse(&s, &p, &rect_cfg).map_err(|e| e.to_string())?.valid_count();
    }
    ensure!(real.is_empty() || after < before, "rectified real frames are not sparser ({after} vs {before})");
    let real_note = if real.is_empty() {
        "no real frames found".to_string()
    } else {
        format!("{} real frames: {before} -> {after} points", real.len())
    };
    Ok(format!("1000 triples hold; {real_note}"))
}

fn post_processing() -> Check {
    let mut rng = common::rng(8);
    for i in 0..300 {
        let (w, h) = (rng.random_range(4..30), rng.random_range(4..30));
        let sparse = common::random_sparse_nonempty(&mut rng, w, h, 0, 0.2);
        let pseudo = pseudo_depth(&sparse, &MorphConfig::default().uncropped()).map_err(|e| e.to_string())?;
        let pred = predict_dense("f", &sparse, &pseudo, &PredictionSource::ZeroResidual).map_err(|e| e.to_string())?;
        let t = rng.random_range(0.001..5.0);
        let schedules = [
            ThresholdSchedule::default(),
            ThresholdSchedule::global(t).map_err(|e| e.to_string())?,
            ThresholdSchedule::new(vec![(rng.random_range(1.0..50.0), t)], t * 2.0).map_err(|e| e.to_string())?,
        ];
        for s in &schedules {
            for band in [BandReference::Predicted, BandReference::Pseudo] {
                let kept = postprocess(&pred, &pseudo, s, band).map_err(|e| e.to_string())?;
                ensure!(kept == pred, "case {i}: zero residual lost pixels under {s}");
            }
        }
        let noisy = DepthImage::from_fn(w, h, |x, y| pseudo.get(x, y).map(|d| (d + rng.random_range(-1.0..1.0)).max(0.01))).map_err(|e| e.to_string())?;
        let mut last = usize::MAX;
        for f in [1.0, 0.7, 0.4, 0.1] {
            let s = ThresholdSchedule::default().scaled(f).map_err(|e| e.to_string())?;
            let n = postprocess(&noisy, &pseudo, &s, BandReference::Predicted).map_err(|e| e.to_string())?.valid_count();
            ensure!(n <= last, "case {i}: retention grew when tightening to {f}");
            last = n;
        }
    }
    let bands = ThresholdSchedule::default().bands();
    ensure!(bands == vec![(10.0, 0.1), (40.0, 0.3), (f64::INFINITY, 0.5)], "default schedule is {bands:?}");
    let help = Command::new(env!("CARGO_BIN_EXE_pseudo-depth"))
        .args(["postprocess", "--help"])
        .output()
        .map_err(|e| e.to_string())?;
    let help = String::from_utf8_lossy(&help.stdout);
    ensure!(help.contains("10:0.1,40:0.3,inf:0.5"), "help text lacks the dynamic schedule");
    Ok("zero residual keeps 100%, tightening is monotone, default (10,0.1),(40,0.3),(inf,0.5) in --help".into())
}

fn geometry() -> Check {
    let mut rng = common::rng(9);
    for i in 0..100 {
        let (w, h) = (rng.random_range(8..160), rng.random_range(8..90));
        let density = rng.random_range(0.05..1.0);
        let img = common::random_sparse(&mut rng, w, h, density, 0.5, 120.0);
        let k = CameraIntrinsics::new(rng.random_range(100.0..900.0), rng.random_range(100.0..900.0), w as f64 / 2.0, h as f64 / 2.0)
            .map_err(|e| e.to_string())?;
        let cloud = backproject(&img, &k);
        let back = project_points(&cloud, &k, &RigidTransform::identity(), (w, h), Rasterization::ZBuffer).map_err(|e| e.to_string())?;
        ensure!(back == img, "image {i} ({w}x{h}) changed after backproject/project");
    }
    let k = CameraIntrinsics::new(700.0, 700.0, 20.0, 10.0).map_err(|e| e.to_string())?;
    let ray = |z: f64| k.backproject(7.0, 3.0, z);
    let cloud = PointCloud::new(vec![ray(5.0), ray(50.0)]).map_err(|e| e.to_string())?;
    let t = RigidTransform::identity();
    let z = project_points(&cloud, &k, &t, (40, 20), Rasterization::ZBuffer).map_err(|e| e.to_string())?;
    let last = project_points(&cloud, &k, &t, (40, 20), Rasterization::LastWrite).map_err(|e| e.to_string())?;
    ensure!(z.get(7, 3) == Some(5.0), "z-buffer kept {:?}", z.get(7, 3));
    ensure!(last.get(7, 3) == Some(50.0), "last-write kept {:?}", last.get(7, 3));
    Ok("100 random images round-trip exactly; collision resolves to 5 m (z-buffer) vs 50 m (last-write)".into())
}

fn performance() -> Check {
    let frame = common::synthetic_kitti_frame(10);
    let cfg = MorphConfig::default();
    let rect = RectifyConfig::default();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let mut times = pool.install(|| -> Result<Vec<f64>, String> {
        let mut times = Vec::new();
        for _ in 0..9 {
            let start = Instant::now();
            let pseudo = pseudo_depth(&frame, &cfg).map_err(|e| e.to_string())?;
            let out = rectify_sparse(&frame, &pseudo, &rect).map_err(|e| e.to_string())?;
            times.push(start.elapsed().as_secs_f64() * 1000.0);
            std::hint::black_box(out);
        }
        Ok(times)
    })?;
    times.sort_by(f64::total_cmp);
    let median = times[times.len() / 2];
    ensure!(median <= 30.0, "median {median:.2} ms over 9 runs exceeds 30 ms");
    Ok(format!("median {median:.2} ms for 1216x352 (9 runs, 1 thread)"))
}

fn external_prediction_eval() -> Check {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let (w, h, crop) = (200, 80, 20);
    let mut rng = common::rng(11);
    let (mut sq, mut n) = (0.0f64, 0usize);
    for i in 0..8 {
        let name = format!("{i:010}.png");
        let sparse = common::random_sparse_nonempty(&mut rng, w, h, crop, 0.05);
        let gt = common::random_sparse_nonempty(&mut rng, w, h, crop, 0.3);
        let noise = rng.random_range(0.1..2.0);
        let pred = DepthImage::from_fn(w, h, |_, y| (y >= crop).then(|| rng.random_range(1.0..80.0))).map_err(|e| e.to_string())?;
        let pred = DepthImage::from_fn(w, h, |x, y| match (gt.get(x, y), pred.get(x, y)) {
            (Some(g), _) => Some((g + rng.random_range(-noise..noise)).max(0.1)),
            (None, p) => p,
        })
        .map_err(|e| e.to_string())?;
        for (role, img) in [("sparse", &sparse), ("gt", &gt), ("pred", &pred)] {
            write_depth_png(dir.path().join(role).join(&name), img).map_err(|e| e.to_string())?;
        }
        // Reported figure, computed from the quantized files as written.
        let gt_q = read_depth_png(dir.path().join("gt").join(&name)).map_err(|e| e.to_string())?;
        let pred_q = read_depth_png(dir.path().join("pred").join(&name)).map_err(|e| e.to_string())?;
        for (g, p) in gt_q.iter().zip(pred_q.iter()) {
            if let (Some(g), Some(p)) = (g, p) {
                sq += ((p - g) * 1000.0).powi(2);
                n += 1;
            }
        }
    }
    let reported = (sq / n as f64).sqrt();
    let report = dir.path().join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_pseudo-depth"))
        .arg("--crop-rows")
        .arg(crop.to_string())
        .arg("--report")
        .arg(&report)
        .arg("eval")
        .arg("--quiet")
        .arg("--pred")
        .arg(dir.path().join("pred"))
        .arg("--gt")
        .arg(dir.path().join("gt"))
        .arg("--sparse")
        .arg(dir.path().join("sparse"))
        .env_remove(DATA_ROOT_ENV)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "eval failed: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&report).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let got = v["aggregate"]["rmse"].as_f64().ok_or("no aggregate RMSE in report")?;
    ensure!(rel_close(got, reported, 0.01), "eval RMSE {got:.3} mm vs reported {reported:.3} mm");
    Ok(format!("eval RMSE {got:.3} mm vs reported {reported:.3} mm over 8 frames"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("format round-trips", format_round_trips),
        ("morphology oracle", morphology_oracle),
        ("coverage invariant", coverage),
        ("metric identities", metric_identities),
        ("edge-mask property", edge_mask_property),
        ("loss identities", loss_identities),
        ("rectification / GT+ properties", rectification_gt_plus),
        ("post-processing", post_processing),
        ("geometry", geometry),
        ("performance", performance),
        ("external prediction eval", external_prediction_eval),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
