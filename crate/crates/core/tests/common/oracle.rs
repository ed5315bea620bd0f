//! Literal set-morphology reference for the densification pipeline.
//!
//! Written pixel by pixel with explicit neighbourhood enumeration; shares no
//! code with the library implementation.
#![allow(clippy::needless_range_loop)]

use pseudo_depth::morphology::{KernelShape, MorphConfig};
use pseudo_depth::DepthImage;

type Grid = Vec<Vec<Option<f64>>>;

fn in_kernel(shape: KernelShape, size: usize, dx: i64, dy: i64) -> bool {
    let r = (size / 2) as i64;
    if dx.abs() > r || dy.abs() > r {
        return false;
    }
    match shape {
        KernelShape::Diamond => dx.abs() + dy.abs() <= r,
        KernelShape::Square => true,
        KernelShape::Cross => dx == 0 || dy == 0,
    }
}

fn neighbours(g: &Grid, x: usize, y: usize, shape: KernelShape, size: usize) -> Vec<Option<f64>> {
    let (h, w) = (g.len() as i64, g[0].len() as i64);
    let mut out = Vec::new();
    for yy in 0..h {
        for xx in 0..w {
            if in_kernel(shape, size, xx - x as i64, yy - y as i64) {
                out.push(g[yy as usize][xx as usize]);
            }
        }
    }
    out
}

/// Nearest depth among the valid pixels of the neighbourhood.
fn dilate(g: &Grid, shape: KernelShape, size: usize) -> Grid {
    (0..g.len())
        .map(|y| {
            (0..g[0].len())
                .map(|x| {
                    neighbours(g, x, y, shape, size)
                        .into_iter()
                        .flatten()
                        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
                })
                .collect()
        })
        .collect()
}

/// Valid only if the whole neighbourhood is valid; then the farthest depth.
fn erode(g: &Grid, shape: KernelShape, size: usize) -> Grid {
    (0..g.len())
        .map(|y| {
            (0..g[0].len())
                .map(|x| {
                    let n = neighbours(g, x, y, shape, size);
                    if n.iter().any(Option::is_none) {
                        None
                    } else {
                        n.into_iter().flatten().reduce(f64::max)
                    }
                })
                .collect()
        })
        .collect()
}

fn fill(g: &Grid) -> Grid {
    let (h, w) = (g.len(), g[0].len());
    // Nearest valid pixel above in the same column.
    let mut a = g.clone();
    for y in 0..h {
        for x in 0..w {
            if g[y][x].is_none() {
                a[y][x] = (0..y).rev().find_map(|yy| g[yy][x]);
            }
        }
    }
    // Nearest valid pixel in the same row, ties to the nearer depth.
    let mut b = a.clone();
    for y in 0..h {
        for x in 0..w {
            if a[y][x].is_some() {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for xx in 0..w {
                if let Some(v) = a[y][xx] {
                    let d = xx.abs_diff(x);
                    best = match best {
                        Some((bd, bv)) if bd < d || (bd == d && bv <= v) => Some((bd, bv)),
                        _ => Some((d, v)),
                    };
                }
            }
            b[y][x] = best.map(|(_, v)| v);
        }
    }
    // Nearest valid pixel below in the same column.
    let mut c = b.clone();
    for y in 0..h {
        for x in 0..w {
            if b[y][x].is_none() {
                c[y][x] = (y + 1..h).find_map(|yy| b[yy][x]);
            }
        }
    }
    c
}

/// Reference pipeline for configurations without blur.
pub fn pseudo_depth_oracle(sparse: &DepthImage, cfg: &MorphConfig) -> Option<DepthImage> {
    let (w, h) = sparse.dims();
    let crop = cfg.top_crop_rows.min(h);
    if crop == h {
        return None;
    }
    let grid: Grid = (crop..h)
        .map(|y| {
            (0..w)
                .map(|x| sparse.get(x, y).filter(|&d| d < cfg.inversion_ceiling))
                .collect()
        })
        .collect();
    if grid.iter().flatten().all(Option::is_none) {
        return None;
    }
    let dk = cfg.dilation_kernel;
    let ck = cfg.closure_kernel;
    let mut g = dilate(&grid, dk.shape, dk.size);
    g = erode(&dilate(&g, ck.shape, ck.size), ck.shape, ck.size);
    if cfg.large_fill_enabled {
        g = fill(&g);
    }
    Some(
        DepthImage::from_fn(w, h, |x, y| if y < crop { None } else { g[y - crop][x] }).unwrap(),
    )
}
