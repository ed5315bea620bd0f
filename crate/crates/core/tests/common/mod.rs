#![allow(dead_code)]

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pseudo_depth::DepthImage;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random sparse image; each pixel valid with probability `density`, depth in `[lo, hi)`.
pub fn random_sparse(rng: &mut impl Rng, w: usize, h: usize, density: f64, lo: f64, hi: f64) -> DepthImage {
    DepthImage::from_fn(w, h, |_, _| rng.random_bool(density).then(|| rng.random_range(lo..hi))).unwrap()
}

/// Same as [`random_sparse`] but guaranteed to hold at least one valid pixel in rows `crop..`.
pub fn random_sparse_nonempty(
    rng: &mut impl Rng,
    w: usize,
    h: usize,
    crop: usize,
    density: f64,
) -> DepthImage {
    loop {
        let img = random_sparse(rng, w, h, density, 0.5, 90.0);
        if img.iter().skip(crop * w).any(|p| p.is_some()) {
            return img;
        }
    }
}

pub fn random_dense(rng: &mut impl Rng, w: usize, h: usize, lo: f64, hi: f64) -> DepthImage {
    random_sparse(rng, w, h, 1.0, lo, hi)
}

/// KITTI-sized synthetic frame: a ground plane, two boxes and a wall seen by
/// a 64-line scanner, about 4-5% dense below the top 100 rows.
pub fn synthetic_kitti_frame(seed: u64) -> DepthImage {
    let (w, h) = (1216usize, 352usize);
    let mut rng = rng(seed);
    let (fy, cy) = (721.5, 180.0);
    let cam_height = 1.65;
    DepthImage::from_fn(w, h, |x, y| {
        if y < 100 {
            return None;
        }
        // Scan lines are irregularly spaced rows; about one in four rows is hit.
        if (y * 37 + 11) % 4 != 0 {
            return None;
        }
        // Horizontal sampling of roughly one in six pixels.
        if !rng.random_bool(0.18) {
            return None;
        }
        let ground = if y as f64 > cy + 1.0 {
            cam_height * fy / (y as f64 - cy)
        } else {
            80.0
        };
        let mut d = ground.min(80.0);
        if (300..420).contains(&x) && y > 150 {
            d = d.min(12.0 + 0.01 * x as f64);
        }
        if (800..900).contains(&x) && y > 130 {
            d = d.min(25.0);
        }
        if y < 160 {
            d = d.min(60.0);
        }
        Some(d + rng.random_range(-0.02..0.02))
    })
    .unwrap()
}
