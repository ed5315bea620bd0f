//! KITTI velodyne scans: packed little-endian `f32` records of `x, y, z, reflectance`.

use std::fs;
use std::path::Path;

use nalgebra::Point3;

use super::cloud::PointCloud;
use crate::error::{Error, Result};

const RECORD: usize = 16;

pub fn parse_velodyne(bytes: &[u8]) -> Result<PointCloud> {
    if !bytes.len().is_multiple_of(RECORD) {
        return Err(Error::PointCloudFormat(format!(
            "scan length {} is not a multiple of {RECORD}",
            bytes.len()
        )));
    }
    let n = bytes.len() / RECORD;
    let mut points = Vec::with_capacity(n);
    let mut reflectance = Vec::with_capacity(n);
    for rec in bytes.chunks_exact(RECORD) {
        let f = |k: usize| f32::from_le_bytes(rec[4 * k..4 * k + 4].try_into().unwrap());
        points.push(Point3::new(f64::from(f(0)), f64::from(f(1)), f64::from(f(2))));
        reflectance.push(f(3));
    }
    PointCloud::with_intensity(points, reflectance)
}

/// Inverse of [`parse_velodyne`]; coordinates are narrowed to `f32`, missing intensity is 0.
pub fn encode_velodyne(cloud: &PointCloud) -> Vec<u8> {
    let mut out = Vec::with_capacity(cloud.len() * RECORD);
    for (i, p) in cloud.points().iter().enumerate() {
        let r = cloud.intensity().map_or(0.0, |v| v[i]);
        for v in [p.x as f32, p.y as f32, p.z as f32, r] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn read_velodyne(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    parse_velodyne(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_velodyne(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, encode_velodyne(cloud)).map_err(|e| Error::io(path, e))
}
