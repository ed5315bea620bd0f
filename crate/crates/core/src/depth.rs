//! Depth image data model.
//!
//! A [`DepthImage`] stores metric depth (meters) in row-major order with the
//! origin at the top-left pixel, plus an explicit validity mask. Invalid pixels
//! are normalized to `0.0` internally so that structural equality only depends
//! on the valid set and its values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense grid of metric depths with a per-pixel validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
    valid: Vec<bool>,
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyDimensions { width, height });
    }
    Ok(())
}

fn is_valid_depth(d: f64) -> bool {
    d.is_finite() && d > 0.0
}

impl DepthImage {
    /// Builds an image from parallel value and mask buffers.
    ///
    /// Every pixel flagged valid must hold a finite depth greater than zero.
    pub fn new(width: usize, height: usize, values: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        check_dims(width, height)?;
        let n = width * height;
        for len in [values.len(), valid.len()] {
            if len != n {
                return Err(Error::BufferLength {
                    width,
                    height,
                    actual: len,
                });
            }
        }
        let mut values = values;
        for (i, (v, &ok)) in values.iter_mut().zip(&valid).enumerate() {
            if ok {
                if !is_valid_depth(*v) {
                    return Err(Error::InvalidDepth {
                        x: i % width,
                        y: i / width,
                        value: *v,
                    });
                }
            } else {
                *v = 0.0;
            }
        }
        Ok(Self {
            width,
            height,
            values,
            valid,
        })
    }

    /// An image with no valid pixels.
    pub fn empty(width: usize, height: usize) -> Result<Self> {
        check_dims(width, height)?;
        let n = width * height;
        Ok(Self {
            width,
            height,
            values: vec![0.0; n],
            valid: vec![false; n],
        })
    }

    /// A fully valid image.
    pub fn dense(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        let valid = vec![true; values.len()];
        Self::new(width, height, values, valid)
    }

    /// Builds an image where `None` marks an invalid pixel.
    pub fn from_options(width: usize, height: usize, pixels: &[Option<f64>]) -> Result<Self> {
        let values = pixels.iter().map(|p| p.unwrap_or(0.0)).collect();
        let valid = pixels.iter().map(Option::is_some).collect();
        Self::new(width, height, values, valid)
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Option<f64>,
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::from_options(width, height, &pixels)
    }

    /// Internal constructor for buffers already known to satisfy the invariants.
    pub(crate) fn from_parts_unchecked(
        width: usize,
        height: usize,
        values: Vec<f64>,
        valid: Vec<bool>,
    ) -> Self {
        debug_assert_eq!(values.len(), width * height);
        debug_assert_eq!(valid.len(), width * height);
        debug_assert!(values
            .iter()
            .zip(&valid)
            .all(|(&v, &ok)| if ok { is_valid_depth(v) } else { v == 0.0 }));
        Self {
            width,
            height,
            values,
            valid,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raw row-major values; entries at invalid pixels are `0.0`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    /// Depth at `(x, y)`, or `None` when the pixel is invalid or out of bounds.
    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        if x >= self.width || y >= self.height {
            return None;
        }
        self.at(self.index(x, y))
    }

    /// Depth at a linear index.
    pub fn at(&self, i: usize) -> Option<f64> {
        if self.valid[i] {
            Some(self.values[i])
        } else {
            None
        }
    }

    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.get(x, y).is_some()
    }

    /// Sets or clears a pixel.
    pub fn set(&mut self, x: usize, y: usize, depth: Option<f64>) -> Result<()> {
        let i = self.index(x, y);
        match depth {
            Some(d) if !is_valid_depth(d) => return Err(Error::InvalidDepth { x, y, value: d }),
            Some(d) => {
                self.values[i] = d;
                self.valid[i] = true;
            }
            None => {
                self.values[i] = 0.0;
                self.valid[i] = false;
            }
        }
        Ok(())
    }

    /// Iterates pixels in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        (0..self.len()).map(move |i| self.at(i))
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Returns an error when the two images differ in size.
    pub fn ensure_same_dims(&self, other: &DepthImage) -> Result<()> {
        ensure_dims(self.dims(), other.dims())
    }

    /// Keeps valid pixels for which `keep(index, depth)` returns true.
    pub fn retain(&self, mut keep: impl FnMut(usize, f64) -> bool) -> DepthImage {
        let mut values = self.values.clone();
        let mut valid = self.valid.clone();
        for i in 0..values.len() {
            if valid[i] && !keep(i, values[i]) {
                valid[i] = false;
                values[i] = 0.0;
            }
        }
        Self::from_parts_unchecked(self.width, self.height, values, valid)
    }

    /// Copy of this image with rows `0..rows` cleared.
    pub fn without_top_rows(&self, rows: usize) -> DepthImage {
        let cut = rows.min(self.height) * self.width;
        self.retain(|i, _| i >= cut)
    }
}

pub(crate) fn ensure_dims(left: (usize, usize), right: (usize, usize)) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Signed per-pixel correction added on top of a pseudo depth map.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ResidualImage {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        if values.len() != width * height {
            return Err(Error::BufferLength {
                width,
                height,
                actual: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "residual at pixel ({}, {}) is not finite",
                i % width,
                i / width
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0.0; width * height])
    }

    /// Residual that maps `pseudo` onto `target` wherever both are valid, zero elsewhere.
    pub fn between(target: &DepthImage, pseudo: &DepthImage) -> Result<Self> {
        target.ensure_same_dims(pseudo)?;
        let values = target
            .iter()
            .zip(pseudo.iter())
            .map(|(t, p)| match (t, p) {
                (Some(t), Some(p)) => t - p,
                _ => 0.0,
            })
            .collect();
        Self::new(target.width(), target.height(), values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `pseudo + residual` at every pixel valid in `pseudo`.
    ///
    /// Pixels where the sum is not a valid depth become invalid.
    pub fn compose(&self, pseudo: &DepthImage) -> Result<DepthImage> {
        ensure_dims(self.dims(), pseudo.dims())?;
        let pixels: Vec<Option<f64>> = pseudo
            .iter()
            .zip(&self.values)
            .map(|(p, r)| p.map(|p| p + r).filter(|d| is_valid_depth(*d)))
            .collect();
        DepthImage::from_options(self.width, self.height, &pixels)
    }
}

/// Fraction of valid pixels in an image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityStat {
    pub valid_count: usize,
    pub total_count: usize,
    pub density: f64,
}

impl DensityStat {
    pub fn from_counts(valid_count: usize, total_count: usize) -> Self {
        let density = if total_count == 0 {
            0.0
        } else {
            valid_count as f64 / total_count as f64
        };
        Self {
            valid_count,
            total_count,
            density,
        }
    }
}

/// Exact valid-pixel density over the whole image.
pub fn density(img: &DepthImage) -> DensityStat {
    DensityStat::from_counts(img.valid_count(), img.len())
}

/// Density restricted to rows `top_rows..height`.
pub fn density_below(img: &DepthImage, top_rows: usize) -> DensityStat {
    let start = top_rows.min(img.height()) * img.width();
    let valid = img.mask()[start..].iter().filter(|&&v| v).count();
    DensityStat::from_counts(valid, img.len() - start)
}
