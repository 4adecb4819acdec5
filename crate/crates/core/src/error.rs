use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad header in {path}: {msg}")]
    Header { path: PathBuf, msg: String },

    #[error("raw payload of {path} has {got} bytes, expected {expected}")]
    PayloadLength {
        path: PathBuf,
        expected: u64,
        got: u64,
    },

    #[error("non-finite voxel at linear index {index}")]
    NonFiniteVoxel { index: usize },

    #[error("volume dims {got:?} do not match expected {expected:?}")]
    DimsMismatch {
        expected: (usize, usize, usize),
        got: (usize, usize, usize),
    },

    #[error("mask voxel value {value} is outside {{0, 1}}")]
    MaskValue { value: f64 },

    #[error("mask has no foreground voxels")]
    EmptyMask,

    #[error("invalid parameter {name}: {msg}")]
    InvalidParam { name: &'static str, msg: String },

    #[error("shape mismatch: expected {expected} features, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("both classes must be present")]
    SingleClass,

    #[error("hyperparameter grid is empty or invalid: {0}")]
    BadGrid(String),

    #[error("component count {k} out of range (max {max})")]
    KOutOfRange { k: usize, max: usize },

    #[error("non-finite value in numeric input")]
    NonFiniteInput,

    #[error("unknown tag `{tag}`")]
    UnknownTag { tag: String },

    #[error("feature subset `{tag}` is empty")]
    EmptySubset { tag: String },

    #[error("table degenerate: {0}")]
    DegenerateTable(String),

    #[error("csv error in {path} line {line}: {msg}")]
    Csv {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("operation requires a linear-kernel model")]
    KernelMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
