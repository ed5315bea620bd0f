// Read and write KITTI 16-bit depth PNGs.
//
// `cargo run --example kitti_png`

use std::error::Error;

use pseudo_depth::kitti_png::{decode_codes, DEPTH_SCALE};
use pseudo_depth::{decode_depth_png, encode_depth_png, read_depth_png, write_depth_png, DepthImage};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let img = DepthImage::from_options(4, 2, &[Some(1.0), None, Some(10.0), Some(0.3), None, Some(255.99), Some(7.123), None])?;
    let bytes = encode_depth_png(&img)?;
    println!("{} valid pixels -> {} PNG bytes", img.valid_count(), bytes.len());

    let codes = decode_codes(&bytes)?;
    println!("raw codes (depth * {DEPTH_SCALE}, 0 = no return): {:?}", codes.codes);

    let back = decode_depth_png(&bytes)?;
    for ((a, b), i) in img.iter().zip(back.iter()).zip(0..) {
        if let (Some(a), Some(b)) = (a, b) {
            println!("pixel {i}: {a} m -> {b} m");
        }
    }

    // Depths below half a quantum cannot be stored.
    let tiny = DepthImage::dense(1, 1, vec![0.001])?;
    println!("encoding 1 mm: {}", encode_depth_png(&tiny).unwrap_err());

    let path = std::env::temp_dir().join("pseudo-depth-example").join("depth.png");
    write_depth_png(&path, &back)?;
    assert_eq!(read_depth_png(&path)?, back);
    println!("round trip through {} is exact", path.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
