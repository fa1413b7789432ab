use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operands live on different grids ({left} vs {right})")]
    GridMismatch { left: String, right: String },

    #[error("expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("invalid bound `{name}`: {reason}")]
    InvalidBound { name: &'static str, reason: String },

    #[error("inconsistent bounds at index {index}: v_minus = {v_minus} exceeds v_plus = {v_plus}")]
    InconsistentBounds {
        index: usize,
        v_minus: f64,
        v_plus: f64,
    },

    #[error("invalid curvature model: {0}")]
    InvalidCurvature(String),

    #[error("degenerate path: {0}")]
    DegeneratePath(String),

    #[error("negative squared speed {value} at index {index}")]
    NegativeSquaredSpeed { index: usize, value: f64 },

    #[error("unknown preset `{0}` (expected example1, example2 or example3)")]
    UnknownPreset(String),

    #[error("problem file: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
