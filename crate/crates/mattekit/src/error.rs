//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by mattekit operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("not a PNG: {0}")]
    NotPng(PathBuf),

    #[error("unsupported PNG ({detail}): {path}")]
    UnsupportedPng { path: PathBuf, detail: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("PNG codec error on {path}: {source}")]
    Codec {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("dimension mismatch: expected {expected_width}x{expected_height}, got {width}x{height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed pyramid: {0}")]
    MalformedPyramid(String),

    #[error("region mask is not binary (value {0} at pixel {1})")]
    NonBinaryMask(f32, usize),

    #[error("empty score batch")]
    EmptyScoreBatch,

    #[error("score {0} outside the open interval (0, 1)")]
    ScoreOutOfRange(f64),

    #[error("score batches have mismatched lengths: {0} vs {1}")]
    BatchLengthMismatch(usize, usize),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("background pool is empty: {0}")]
    EmptyBackgroundPool(PathBuf),
}

impl Error {
    pub(crate) fn dims(ew: usize, eh: usize, w: usize, h: usize) -> Self {
        Error::DimensionMismatch {
            expected_width: ew,
            expected_height: eh,
            width: w,
            height: h,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks that two rasters share dimensions, in one call.
pub(crate) fn ensure_same_dims(
    ew: usize,
    eh: usize,
    w: usize,
    h: usize,
) -> std::result::Result<(), Error> {
    if ew != w || eh != h {
        return Err(Error::dims(ew, eh, w, h));
    }
    Ok(())
}
