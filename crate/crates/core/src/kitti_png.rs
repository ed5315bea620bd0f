//! KITTI depth PNG codec.
//!
//! Depth maps are stored as single-channel 16-bit PNGs where a code `v > 0`
//! means `v / 256` meters and `v == 0` means "no measurement".

use std::fs;
use std::io::Cursor;
use std::path::Path;

use crate::depth::DepthImage;
use crate::error::{Error, Result};

/// Depth quantum of the format in meters.
pub const DEPTH_SCALE: f64 = 256.0;

/// Raw 16-bit codes of a depth PNG, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthCodes {
    pub width: usize,
    pub height: usize,
    pub codes: Vec<u16>,
}

/// Decodes the raw 16-bit codes without interpreting them.
pub fn decode_codes(bytes: &[u8]) -> Result<DepthCodes> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info()?;
    let (color, bit_depth) = reader.output_color_type();
    if color != png::ColorType::Grayscale {
        return Err(Error::UnsupportedPng(format!(
            "expected single-channel grayscale, got {color:?}"
        )));
    }
    if bit_depth != png::BitDepth::Sixteen {
        return Err(Error::UnsupportedPng(format!(
            "expected 16-bit samples, got {bit_depth:?}"
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::UnsupportedPng("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf)?;
    let (width, height) = (info.width as usize, info.height as usize);
    let stride = info.line_size;
    let mut codes = Vec::with_capacity(width * height);
    for row in buf[..info.buffer_size()].chunks_exact(stride).take(height) {
        codes.extend(
            row[..width * 2]
                .chunks_exact(2)
                .map(|b| u16::from_be_bytes([b[0], b[1]])),
        );
    }
    Ok(DepthCodes {
        width,
        height,
        codes,
    })
}

/// Encodes raw 16-bit codes as a grayscale PNG.
pub fn encode_codes(codes: &DepthCodes) -> Result<Vec<u8>> {
    if codes.codes.len() != codes.width * codes.height {
        return Err(Error::BufferLength {
            width: codes.width,
            height: codes.height,
            actual: codes.codes.len(),
        });
    }
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, codes.width as u32, codes.height as u32);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Sixteen);
        let mut writer = encoder.write_header()?;
        let data: Vec<u8> = codes.codes.iter().flat_map(|c| c.to_be_bytes()).collect();
        writer.write_image_data(&data)?;
        writer.finish()?;
    }
    Ok(out)
}

impl DepthCodes {
    /// Interprets codes as metric depth.
    pub fn to_depth(&self) -> Result<DepthImage> {
        let values = self
            .codes
            .iter()
            .map(|&c| f64::from(c) / DEPTH_SCALE)
            .collect();
        let valid = self.codes.iter().map(|&c| c > 0).collect();
        DepthImage::new(self.width, self.height, values, valid)
    }

    /// Quantizes a depth image, rejecting depths that would round to 0 or overflow.
    pub fn from_depth(img: &DepthImage) -> Result<Self> {
        let mut codes = Vec::with_capacity(img.len());
        for (i, px) in img.iter().enumerate() {
            let code = match px {
                None => 0,
                Some(d) => {
                    let q = (d * DEPTH_SCALE).round();
                    if !(1.0..=f64::from(u16::MAX)).contains(&q) {
                        return Err(Error::Unencodable {
                            x: i % img.width(),
                            y: i / img.width(),
                            depth: d,
                        });
                    }
                    q as u16
                }
            };
            codes.push(code);
        }
        Ok(Self {
            width: img.width(),
            height: img.height(),
            codes,
        })
    }
}

pub fn decode_depth_png(bytes: &[u8]) -> Result<DepthImage> {
    decode_codes(bytes)?.to_depth()
}

pub fn encode_depth_png(img: &DepthImage) -> Result<Vec<u8>> {
    encode_codes(&DepthCodes::from_depth(img)?)
}

pub fn read_depth_png(path: impl AsRef<Path>) -> Result<DepthImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_depth_png(&bytes)
}

pub fn write_depth_png(path: impl AsRef<Path>, img: &DepthImage) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_depth_png(img)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
