//! KITTI calibration text files.
//!
//! Accepted inputs, merged across one or more files:
//! - `key: numbers` lines as in the object/odometry `calib/*.txt` files
//!   (`P2`, `R0_rect`, `Tr_velo_to_cam`) or the raw-data pair
//!   `calib_cam_to_cam.txt` (`P_rect_02`, `R_rect_00`) and
//!   `calib_velo_to_cam.txt` (`R`, `T`);
//! - a bare list of 9 numbers (a 3x3 camera matrix, as in the depth-completion
//!   `intrinsics/*.txt` files) or 12 numbers (a 3x4 projection matrix).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::{Matrix3, Matrix3x4, Vector3};

use super::camera::{CameraIntrinsics, RigidTransform};
use crate::error::{Error, Result};

/// Camera model plus the LiDAR-to-camera motion, if the files provide one.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub intrinsics: CameraIntrinsics,
    /// Maps LiDAR points into the rectified camera frame of `intrinsics`.
    pub velo_to_cam: Option<RigidTransform>,
}

#[derive(Debug, Default)]
struct Entries {
    keyed: BTreeMap<String, Vec<f64>>,
    bare: Vec<f64>,
}

fn parse_numbers(s: &str) -> Option<Vec<f64>> {
    s.split_whitespace().map(|t| t.parse().ok()).collect()
}

impl Entries {
    fn absorb(&mut self, text: &str) {
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once(':') {
                Some((key, rest)) => {
                    // Non-numeric entries such as `calib_time` are ignored.
                    if let Some(nums) = parse_numbers(rest) {
                        self.keyed.insert(key.trim().to_string(), nums);
                    }
                }
                None => {
                    if let Some(nums) = parse_numbers(line) {
                        self.bare.extend(nums);
                    }
                }
            }
        }
    }

    fn get(&self, keys: &[&str], len: usize) -> Result<Option<&[f64]>> {
        for k in keys {
            if let Some(v) = self.keyed.get(*k) {
                if v.len() != len {
                    return Err(Error::Calibration(format!(
                        "{k} has {} values, expected {len}",
                        v.len()
                    )));
                }
                return Ok(Some(v));
            }
        }
        Ok(None)
    }
}

fn mat3(v: &[f64]) -> Matrix3<f64> {
    Matrix3::from_row_slice(v)
}

fn intrinsics_from_k(k: &Matrix3<f64>) -> Result<CameraIntrinsics> {
    CameraIntrinsics::new(k[(0, 0)], k[(1, 1)], k[(0, 2)], k[(1, 2)])
        .map_err(|e| Error::Calibration(e.to_string()))
}

/// Splits `P = K [I | b]` into intrinsics and the camera offset `b`.
fn split_projection(p: &Matrix3x4<f64>) -> Result<(CameraIntrinsics, Vector3<f64>)> {
    let k: Matrix3<f64> = p.fixed_view::<3, 3>(0, 0).into_owned();
    let kinv = k
        .try_inverse()
        .ok_or_else(|| Error::Calibration("singular projection matrix".into()))?;
    let b = kinv * p.column(3);
    Ok((intrinsics_from_k(&k)?, b))
}

pub fn parse_calibration(text: &str) -> Result<Calibration> {
    let mut e = Entries::default();
    e.absorb(text);
    from_entries(&e)
}

pub fn read_calibration(paths: &[impl AsRef<Path>]) -> Result<Calibration> {
    let mut e = Entries::default();
    for p in paths {
        let p = p.as_ref();
        e.absorb(&fs::read_to_string(p).map_err(|err| Error::io(p, err))?);
    }
    from_entries(&e)
}

fn from_entries(e: &Entries) -> Result<Calibration> {
    let projection = e.get(&["P2", "P_rect_02"], 12)?;
    let (intrinsics, offset) = match projection {
        Some(p) => split_projection(&Matrix3x4::from_row_slice(p))?,
        None => match e.bare.len() {
            9 => (intrinsics_from_k(&mat3(&e.bare))?, Vector3::zeros()),
            12 => split_projection(&Matrix3x4::from_row_slice(&e.bare))?,
            0 => return Err(Error::Calibration("no camera matrix found".into())),
            n => {
                return Err(Error::Calibration(format!(
                    "expected 9 or 12 bare values, found {n}"
                )))
            }
        },
    };

    let velo = match e.get(&["Tr_velo_to_cam"], 12)? {
        Some(tr) => {
            let m = Matrix3x4::from_row_slice(tr);
            let r: Matrix3<f64> = m.fixed_view::<3, 3>(0, 0).into_owned();
            Some((r, Vector3::new(m[(0, 3)], m[(1, 3)], m[(2, 3)])))
        }
        None => match (e.get(&["R"], 9)?, e.get(&["T"], 3)?) {
            (Some(r), Some(t)) => Some((mat3(r), Vector3::from_row_slice(t))),
            _ => None,
        },
    };
    let rect = e.get(&["R0_rect", "R_rect_00"], 9)?.map(mat3);

    let velo_to_cam = match velo {
        Some((r, t)) => {
            let rect = rect.unwrap_or_else(Matrix3::identity);
            let rotation = rect * r;
            let translation = rect * t + offset;
            Some(
                RigidTransform::from_approximate(rotation, translation)
                    .map_err(|err| Error::Calibration(err.to_string()))?,
            )
        }
        None => None,
    };
    Ok(Calibration {
        intrinsics,
        velo_to_cam,
    })
}
