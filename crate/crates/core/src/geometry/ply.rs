//! Binary little-endian PLY export and import for point clouds.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::Point3;

use super::cloud::PointCloud;
use crate::error::{Error, Result};

/// Serializes `x, y, z` as doubles and intensity (when present) as a float.
pub fn write_ply<W: Write>(cloud: &PointCloud, mut out: W) -> Result<()> {
    let mut header = String::from("ply\nformat binary_little_endian 1.0\n");
    header.push_str(&format!("element vertex {}\n", cloud.len()));
    header.push_str("property double x\nproperty double y\nproperty double z\n");
    if cloud.intensity().is_some() {
        header.push_str("property float intensity\n");
    }
    header.push_str("end_header\n");
    out.write_all(header.as_bytes())?;

    let stride = 24 + if cloud.intensity().is_some() { 4 } else { 0 };
    let mut body = Vec::with_capacity(cloud.len() * stride);
    for (i, p) in cloud.points().iter().enumerate() {
        for c in [p.x, p.y, p.z] {
            body.extend_from_slice(&c.to_le_bytes());
        }
        if let Some(vals) = cloud.intensity() {
            body.extend_from_slice(&vals[i].to_le_bytes());
        }
    }
    out.write_all(&body)?;
    out.flush()?;
    Ok(())
}

pub fn export_ply(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_ply(cloud, &mut buf)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }

    fn read(self, b: &[u8]) -> f64 {
        match self {
            Self::I8 => f64::from(b[0] as i8),
            Self::U8 => f64::from(b[0]),
            Self::I16 => f64::from(i16::from_le_bytes([b[0], b[1]])),
            Self::U16 => f64::from(u16::from_le_bytes([b[0], b[1]])),
            Self::I32 => f64::from(i32::from_le_bytes(b[..4].try_into().unwrap())),
            Self::U32 => f64::from(u32::from_le_bytes(b[..4].try_into().unwrap())),
            Self::F32 => f64::from(f32::from_le_bytes(b[..4].try_into().unwrap())),
            Self::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::PointCloudFormat(msg.into())
}

/// Reads a binary little-endian PLY with a single `vertex` element.
///
/// `x`, `y`, `z` are required; an `intensity` property is picked up when present.
/// Other scalar properties are skipped.
pub fn read_ply(bytes: &[u8]) -> Result<PointCloud> {
    let mut cursor = bytes;
    let mut line = String::new();
    let mut next_line = |cursor: &mut &[u8]| -> Result<String> {
        line.clear();
        if cursor.read_line(&mut line)? == 0 {
            return Err(bad("unexpected end of header"));
        }
        Ok(line.trim_end().to_string())
    };

    if next_line(&mut cursor)? != "ply" {
        return Err(bad("missing ply magic"));
    }
    let mut count = None;
    let mut props: Vec<(String, Scalar)> = Vec::new();
    let mut in_vertex = false;
    loop {
        let l = next_line(&mut cursor)?;
        let tok: Vec<&str> = l.split_whitespace().collect();
        match tok.as_slice() {
            ["end_header"] => break,
            ["format", "binary_little_endian", _] => {}
            ["format", other, ..] => return Err(bad(format!("unsupported format {other}"))),
            ["comment", ..] | ["obj_info", ..] => {}
            ["element", "vertex", n] => {
                count = Some(n.parse::<usize>().map_err(|_| bad("bad vertex count"))?);
                in_vertex = true;
            }
            ["element", name, n] => {
                if n.parse::<usize>().map_or(true, |n| n > 0) {
                    return Err(bad(format!("unsupported element {name}")));
                }
                in_vertex = false;
            }
            ["property", "list", ..] if in_vertex => {
                return Err(bad("list properties are not supported"))
            }
            ["property", ty, name] if in_vertex => {
                let s = Scalar::parse(ty).ok_or_else(|| bad(format!("unknown type {ty}")))?;
                props.push((name.to_string(), s));
            }
            ["property", ..] => {}
            _ => return Err(bad(format!("unexpected header line {l:?}"))),
        }
    }
    let count = count.ok_or_else(|| bad("no vertex element"))?;
    let find = |n: &str| props.iter().position(|(p, _)| p == n);
    let (ix, iy, iz) = match (find("x"), find("y"), find("z")) {
        (Some(x), Some(y), Some(z)) => (x, y, z),
        _ => return Err(bad("vertex element lacks x/y/z")),
    };
    let ii = find("intensity");
    let offsets: Vec<usize> = props
        .iter()
        .scan(0, |acc, (_, s)| {
            let o = *acc;
            *acc += s.size();
            Some(o)
        })
        .collect();
    let stride: usize = props.iter().map(|(_, s)| s.size()).sum();
    if cursor.len() < count * stride {
        return Err(bad(format!(
            "body holds {} bytes, expected {}",
            cursor.len(),
            count * stride
        )));
    }
    let mut points = Vec::with_capacity(count);
    let mut intensity = ii.map(|_| Vec::with_capacity(count));
    for rec in cursor.chunks_exact(stride.max(1)).take(count) {
        let get = |k: usize| props[k].1.read(&rec[offsets[k]..]);
        points.push(Point3::new(get(ix), get(iy), get(iz)));
        if let (Some(k), Some(vals)) = (ii, intensity.as_mut()) {
            vals.push(get(k) as f32);
        }
    }
    match intensity {
        Some(v) => PointCloud::with_intensity(points, v),
        None => PointCloud::new(points),
    }
}

pub fn import_ply(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    read_ply(&fs::read(path).map_err(|e| Error::io(path, e))?)
}
