use nalgebra::Point3;

use super::camera::{CameraIntrinsics, RigidTransform};
use crate::depth::DepthImage;
use crate::error::{Error, Result};

/// 3D points in meters with optional per-point intensity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Point3<f64>>,
    intensity: Option<Vec<f32>>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3<f64>>) -> Result<Self> {
        Self::build(points, None)
    }

    pub fn with_intensity(points: Vec<Point3<f64>>, intensity: Vec<f32>) -> Result<Self> {
        Self::build(points, Some(intensity))
    }

    fn build(points: Vec<Point3<f64>>, intensity: Option<Vec<f32>>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::PointCloudFormat(format!("point {i} is not finite")));
        }
        if let Some(vals) = &intensity {
            if vals.len() != points.len() {
                return Err(Error::PointCloudFormat(format!(
                    "{} intensities for {} points",
                    vals.len(),
                    points.len()
                )));
            }
        }
        Ok(Self { points, intensity })
    }

    pub fn points(&self) -> &[Point3<f64>] {
        &self.points
    }

    pub fn intensity(&self) -> Option<&[f32]> {
        self.intensity.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points whose index satisfies `keep`, intensities carried along.
    pub fn select(&self, mut keep: impl FnMut(usize, &Point3<f64>) -> bool) -> PointCloud {
        let idx: Vec<usize> = (0..self.len())
            .filter(|&i| keep(i, &self.points[i]))
            .collect();
        PointCloud {
            points: idx.iter().map(|&i| self.points[i]).collect(),
            intensity: self
                .intensity
                .as_ref()
                .map(|v| idx.iter().map(|&i| v[i]).collect()),
        }
    }

    pub fn transformed(&self, t: &RigidTransform) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|p| t.apply(p)).collect(),
            intensity: self.intensity.clone(),
        }
    }
}

/// One camera-frame point per valid pixel.
pub fn backproject(depth: &DepthImage, k: &CameraIntrinsics) -> PointCloud {
    let w = depth.width();
    let points = depth
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.map(|d| k.backproject((i % w) as f64, (i / w) as f64, d)))
        .collect();
    PointCloud {
        points,
        intensity: None,
    }
}

/// How colliding points are resolved when rasterizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rasterization {
    /// Nearest depth wins.
    #[default]
    ZBuffer,
    /// The last point in input order wins. Reproduces LiDAR penetration artifacts.
    LastWrite,
}

/// Rasterizes a cloud into a sparse depth image of `(width, height)` pixels.
///
/// Points are moved into the camera frame by `t` and snapped to the nearest
/// pixel. Points behind the camera or outside the image are dropped.
pub fn project_points(
    cloud: &PointCloud,
    k: &CameraIntrinsics,
    t: &RigidTransform,
    size: (usize, usize),
    mode: Rasterization,
) -> Result<DepthImage> {
    let (w, h) = size;
    let mut img = DepthImage::empty(w, h)?;
    for p in cloud.points() {
        let q = t.apply(p);
        if !(q.z > 0.0 && q.z.is_finite()) {
            continue;
        }
        let (u, v) = k.project(&q);
        let (u, v) = (u.round(), v.round());
        if !(u >= 0.0 && v >= 0.0 && u < w as f64 && v < h as f64) {
            continue;
        }
        let (x, y) = (u as usize, v as usize);
        let write = match (mode, img.get(x, y)) {
            (Rasterization::ZBuffer, Some(existing)) => q.z < existing,
            _ => true,
        };
        if write {
            img.set(x, y, Some(q.z))?;
        }
    }
    Ok(img)
}
