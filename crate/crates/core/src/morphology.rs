//! Morphological densification of sparse LiDAR depth.
//!
//! The pipeline follows the classic fast-densification recipe: depths are
//! inverted so that nearer returns dominate, dilated with a small kernel,
//! small holes are closed, remaining holes are filled from the nearest filled
//! pixels, an optional blur is applied, and depths are restored.
//!
//! Internally the inversion is realised as an order reversal rather than the
//! arithmetic `ceiling - d`: the working buffer holds depths with `+inf` for
//! empty pixels, so "max over inverted depth" is "min over depth" and empty
//! pixels lose against any return. Output values are therefore always exact
//! copies of input depths when blur is disabled.

use serde::{Deserialize, Serialize};

use crate::depth::DepthImage;
use crate::error::{Error, Result};

const EMPTY: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelShape {
    /// `|dx| + |dy| <= r`.
    Diamond,
    /// Full square.
    Square,
    /// Center row and column.
    Cross,
}

/// Odd-sized structuring element centred on the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kernel {
    pub shape: KernelShape,
    pub size: usize,
}

impl Kernel {
    pub const fn new(shape: KernelShape, size: usize) -> Self {
        Self { shape, size }
    }

    pub const fn diamond(size: usize) -> Self {
        Self::new(KernelShape::Diamond, size)
    }

    pub const fn square(size: usize) -> Self {
        Self::new(KernelShape::Square, size)
    }

    pub const fn cross(size: usize) -> Self {
        Self::new(KernelShape::Cross, size)
    }

    pub fn radius(&self) -> isize {
        (self.size / 2) as isize
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 || self.size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "kernel size must be odd and >= 1, got {}",
                self.size
            )));
        }
        Ok(())
    }

    /// `(dx, dy)` offsets covered by the kernel, row-major.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        let r = self.radius();
        let mut out = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                let inside = match self.shape {
                    KernelShape::Diamond => dx.abs() + dy.abs() <= r,
                    KernelShape::Square => true,
                    KernelShape::Cross => dx == 0 || dy == 0,
                };
                if inside {
                    out.push((dx, dy));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Blur {
    #[default]
    None,
    /// Median over a `size x size` window clipped at the image border.
    Median { size: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MorphConfig {
    pub dilation_kernel: Kernel,
    pub closure_kernel: Kernel,
    pub large_fill_enabled: bool,
    /// Range bound in meters. Returns at or beyond it are discarded.
    pub inversion_ceiling: f64,
    /// Rows at the top of the frame that carry no LiDAR returns; left invalid.
    pub top_crop_rows: usize,
    pub blur: Blur,
}

impl Default for MorphConfig {
    fn default() -> Self {
        Self {
            dilation_kernel: Kernel::diamond(5),
            closure_kernel: Kernel::square(5),
            large_fill_enabled: true,
            inversion_ceiling: 100.0,
            top_crop_rows: 100,
            blur: Blur::None,
        }
    }
}

impl MorphConfig {
    pub fn validate(&self) -> Result<()> {
        self.dilation_kernel.validate()?;
        self.closure_kernel.validate()?;
        if !(self.inversion_ceiling.is_finite() && self.inversion_ceiling > 0.0) {
            return Err(Error::Config(format!(
                "inversion ceiling must be finite and positive, got {}",
                self.inversion_ceiling
            )));
        }
        if let Blur::Median { size } = self.blur {
            if size == 0 || size % 2 == 0 {
                return Err(Error::Config(format!(
                    "median size must be odd, got {size}"
                )));
            }
        }
        Ok(())
    }

    /// Same pipeline without the top-row crop; used for small synthetic frames.
    pub fn uncropped(mut self) -> Self {
        self.top_crop_rows = 0;
        self
    }
}

/// Row-major working grid; `EMPTY` marks a missing depth.
struct Grid {
    w: usize,
    h: usize,
    data: Vec<f64>,
}

impl Grid {
    fn filter(&self, kernel: &Kernel, reduce: impl Fn(f64, f64) -> f64 + Copy, init: f64) -> Grid {
        if kernel.shape == KernelShape::Square {
            let r = kernel.radius();
            let horiz = self.shifted_reduce(&line_offsets(r, true), reduce, init);
            return horiz.shifted_reduce(&line_offsets(r, false), reduce, init);
        }
        self.shifted_reduce(&kernel.offsets(), reduce, init)
    }

    /// For every offset, folds the shifted grid into the output; out-of-bounds taps are skipped.
    fn shifted_reduce(
        &self,
        offsets: &[(isize, isize)],
        reduce: impl Fn(f64, f64) -> f64,
        init: f64,
    ) -> Grid {
        let (w, h) = (self.w as isize, self.h as isize);
        let mut out = vec![init; self.data.len()];
        for &(dx, dy) in offsets {
            let x0 = (-dx).max(0);
            let x1 = (w - dx).min(w);
            if x0 >= x1 {
                continue;
            }
            let y0 = (-dy).max(0);
            let y1 = (h - dy).min(h);
            for y in y0..y1 {
                let len = (x1 - x0) as usize;
                let dst = (y * w + x0) as usize;
                let src = ((y + dy) * w + x0 + dx) as usize;
                let dst_row = &mut out[dst..dst + len];
                let src_row = &self.data[src..src + len];
                for (o, &s) in dst_row.iter_mut().zip(src_row) {
                    *o = reduce(*o, s);
                }
            }
        }
        Grid {
            w: self.w,
            h: self.h,
            data: out,
        }
    }

    fn dilate(&self, kernel: &Kernel) -> Grid {
        // Plain comparisons: the grid never holds NaN.
        self.filter(kernel, |a, b| if b < a { b } else { a }, EMPTY)
    }

    fn erode(&self, kernel: &Kernel) -> Grid {
        self.filter(kernel, |a, b| if b > a { b } else { a }, f64::NEG_INFINITY)
    }

    fn fill_large_holes(&mut self) {
        let (w, h) = (self.w, self.h);
        let d = &mut self.data;
        // Extend each column's values downward.
        for x in 0..w {
            let mut last = EMPTY;
            for y in 0..h {
                let i = y * w + x;
                if d[i] == EMPTY {
                    d[i] = last;
                } else {
                    last = d[i];
                }
            }
        }
        // Row-wise nearest valid value; ties go to the nearer depth.
        let mut left = vec![None::<usize>; w];
        for y in 0..h {
            let row = &mut d[y * w..(y + 1) * w];
            let mut seen = None;
            for x in 0..w {
                if row[x] != EMPTY {
                    seen = Some(x);
                }
                left[x] = seen;
            }
            let mut right = None;
            for x in (0..w).rev() {
                if row[x] != EMPTY {
                    right = Some(x);
                    continue;
                }
                row[x] = match (left[x], right) {
                    (Some(l), Some(r)) => {
                        let (dl, dr) = (x - l, r - x);
                        if dl < dr {
                            row[l]
                        } else if dr < dl {
                            row[r]
                        } else {
                            row[l].min(row[r])
                        }
                    }
                    (Some(l), None) => row[l],
                    (None, Some(r)) => row[r],
                    (None, None) => EMPTY,
                };
            }
        }
        // Rows above the first return take the value below them.
        for x in 0..w {
            let mut next = EMPTY;
            for y in (0..h).rev() {
                let i = y * w + x;
                if d[i] == EMPTY {
                    d[i] = next;
                } else {
                    next = d[i];
                }
            }
        }
    }

    fn median(&self, size: usize) -> Grid {
        let r = (size / 2) as isize;
        let (w, h) = (self.w as isize, self.h as isize);
        let mut out = self.data.clone();
        let mut window = Vec::with_capacity(size * size);
        for y in 0..h {
            for x in 0..w {
                let i = (y * w + x) as usize;
                if self.data[i] == EMPTY {
                    continue;
                }
                window.clear();
                for yy in (y - r).max(0)..(y + r + 1).min(h) {
                    for xx in (x - r).max(0)..(x + r + 1).min(w) {
                        let v = self.data[(yy * w + xx) as usize];
                        if v != EMPTY {
                            window.push(v);
                        }
                    }
                }
                window.sort_by(f64::total_cmp);
                out[i] = window[(window.len() - 1) / 2];
            }
        }
        Grid {
            w: self.w,
            h: self.h,
            data: out,
        }
    }
}

fn line_offsets(r: isize, horizontal: bool) -> Vec<(isize, isize)> {
    (-r..=r)
        .map(|k| if horizontal { (k, 0) } else { (0, k) })
        .collect()
}

/// Densifies a sparse depth image.
///
/// Rows above `cfg.top_crop_rows` are invalid in the output. With large-hole
/// filling enabled every pixel below the crop is valid.
pub fn pseudo_depth(sparse: &DepthImage, cfg: &MorphConfig) -> Result<DepthImage> {
    cfg.validate()?;
    let (w, h) = sparse.dims();
    let crop = cfg.top_crop_rows.min(h);
    let start = crop * w;
    let data: Vec<f64> = sparse.values()[start..]
        .iter()
        .zip(&sparse.mask()[start..])
        .map(|(&d, &ok)| {
            if ok && d < cfg.inversion_ceiling {
                d
            } else {
                EMPTY
            }
        })
        .collect();
    if data.iter().all(|&d| d == EMPTY) {
        return Err(Error::NoValidPixels);
    }
    let grid = Grid {
        w,
        h: h - crop,
        data,
    };

    let dilated = grid.dilate(&cfg.dilation_kernel);
    let mut closed = dilated
        .dilate(&cfg.closure_kernel)
        .erode(&cfg.closure_kernel);
    if cfg.large_fill_enabled {
        closed.fill_large_holes();
    }
    let out = match cfg.blur {
        Blur::None => closed,
        Blur::Median { size } => closed.median(size),
    };

    let mut values = vec![0.0; w * h];
    let mut valid = vec![false; w * h];
    for (i, &d) in out.data.iter().enumerate() {
        if d != EMPTY {
            values[start + i] = d;
            valid[start + i] = true;
        }
    }
    Ok(DepthImage::from_parts_unchecked(w, h, values, valid))
}

/// Dense pseudo ground truth: the same densification applied to sparse ground truth.
pub fn pseudo_ground_truth(gt: &DepthImage, cfg: &MorphConfig) -> Result<DepthImage> {
    pseudo_depth(gt, cfg)
}

/// Per-pixel gradient magnitude `|dx| + |dy|` of a depth map.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub width: usize,
    pub height: usize,
    /// Zero at pixels outside the mask.
    pub values: Vec<f64>,
    /// Pixels the gradient is defined on (the valid set of the source).
    pub mask: Vec<bool>,
}

impl GradientField {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Mean magnitude over masked pixels; `None` if the mask is empty.
    pub fn mean(&self) -> Option<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for (&v, &m) in self.values.iter().zip(&self.mask) {
            if m {
                sum += v;
                n += 1;
            }
        }
        (n > 0).then(|| sum / n as f64)
    }
}

/// Forward-difference L1 gradient over the masked part of a scalar grid.
///
/// A difference whose forward neighbour is outside the image or outside the
/// mask is zero (replicated border).
pub(crate) fn forward_gradient_l1(values: &[f64], mask: &[bool], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !mask[i] {
                continue;
            }
            let gx = if x + 1 < w && mask[i + 1] {
                values[i + 1] - values[i]
            } else {
                0.0
            };
            let gy = if y + 1 < h && mask[i + w] {
                values[i + w] - values[i]
            } else {
                0.0
            };
            out[i] = gx.abs() + gy.abs();
        }
    }
    out
}

/// Gradient magnitude of a (dense) depth map in meters per pixel.
pub fn gradient_magnitude(dense: &DepthImage) -> GradientField {
    let (w, h) = dense.dims();
    GradientField {
        width: w,
        height: h,
        values: forward_gradient_l1(dense.values(), dense.mask(), w, h),
        mask: dense.mask().to_vec(),
    }
}
