// Emulate 32- and 16-line LiDARs from a 64-line scan.
//
// `cargo run --example subsample_scan [scan.bin calib.txt]`

use std::env;
use std::error::Error;

use nalgebra::Point3;
use pseudo_depth::geometry::{
    parse_calibration, project_points, read_calibration, read_velodyne, subsample_scan, Calibration, PointCloud,
    Rasterization, RangeViewConfig,
};
use pseudo_depth::density;

const CALIB: &str = "\
P2: 7.215377e+02 0.000000e+00 6.095593e+02 4.485728e+01 0.000000e+00 7.215377e+02 1.728540e+02 2.163791e-01 0.000000e+00 0.000000e+00 1.000000e+00 2.745884e-03
R0_rect: 9.999239e-01 9.837760e-03 -7.445048e-03 -9.869795e-03 9.999421e-01 -4.278459e-03 7.402527e-03 4.351614e-03 9.999631e-01
Tr_velo_to_cam: 7.533745e-03 -9.999714e-01 -6.166020e-04 -4.069766e-03 1.480249e-02 7.280733e-04 -9.998902e-01 -7.631618e-02 9.998621e-01 7.523790e-03 1.480755e-02 -2.717806e-01
";

/// A 64-line sweep over flat ground 1.73 m below the sensor.
fn synthetic_scan(cfg: &RangeViewConfig) -> Result<PointCloud, pseudo_depth::Error> {
    let span = cfg.max_elevation_deg - cfg.min_elevation_deg;
    let mut points = Vec::new();
    for row in 0..cfg.rows {
        let elev = (cfg.max_elevation_deg - (row as f64 + 0.5) * span / cfg.rows as f64).to_radians();
        for step in 0..2000 {
            let az = (step as f64 * 0.18).to_radians();
            let range = if elev < -0.01 { (1.73 / -elev.sin()).min(60.0) } else { 60.0 };
            points.push(Point3::new(range * elev.cos() * az.cos(), range * elev.cos() * az.sin(), range * elev.sin()));
        }
    }
    PointCloud::new(points)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let args: Vec<String> = env::args().skip(1).collect();
    let cfg = RangeViewConfig::default();
    let (scan, calib): (PointCloud, Calibration) = match args.as_slice() {
        [scan, calib, ..] => (read_velodyne(scan)?, read_calibration(&[calib])?),
        _ => (synthetic_scan(&cfg)?, parse_calibration(CALIB)?),
    };
    let velo_to_cam = calib.velo_to_cam.ok_or("calibration lacks a LiDAR-to-camera transform")?;

    for (lines, keep) in [(64, 1), (32, 2), (16, 4)] {
        let sub = subsample_scan(&scan, keep, &cfg)?;
        let depth = project_points(&sub, &calib.intrinsics, &velo_to_cam, (1242, 375), Rasterization::ZBuffer)?;
        println!(
            "{lines:>2} lines: {:>7} points, {:.2}% of image pixels",
            sub.len(),
            100.0 * density(&depth).density
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
