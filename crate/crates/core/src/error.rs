use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the depth pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },

    #[error("buffer length {actual} does not match {width}x{height}")]
    BufferLength {
        width: usize,
        height: usize,
        actual: usize,
    },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid depth {value} at pixel ({x}, {y}): valid depths must be finite and > 0")]
    InvalidDepth { x: usize, y: usize, value: f64 },

    #[error("depth {depth} m at pixel ({x}, {y}) is outside the encodable range (1/512 m .. 65535/256 m)")]
    Unencodable { x: usize, y: usize, depth: f64 },

    #[error("malformed PNG: {0}")]
    PngDecode(#[from] png::DecodingError),

    #[error("PNG encoding failed: {0}")]
    PngEncode(#[from] png::EncodingError),

    #[error("unsupported depth PNG layout: {0}")]
    UnsupportedPng(String),

    #[error("input has no valid pixels in the evaluated region")]
    NoValidPixels,

    #[error("evaluation set is empty")]
    EmptyEvaluationSet,

    #[error("pixel ({x}, {y}) is invalid but the operation requires a dense input")]
    NotDense { x: usize, y: usize },

    #[error("SSIM window {window} does not fit a {width}x{height} region")]
    WindowTooLarge {
        window: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("malformed point cloud data: {0}")]
    PointCloudFormat(String),

    #[error("calibration parse error: {0}")]
    Calibration(String),

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    IoRaw(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
