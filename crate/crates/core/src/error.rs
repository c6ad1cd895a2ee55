use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = SqgError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SqgError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("config line {line}: key `{key}`: {reason}")]
    ConfigKey {
        line: usize,
        key: String,
        reason: String,
    },

    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid mismatch: {left} vs {right} points per axis")]
    GridMismatch { left: usize, right: usize },

    #[error("product grid with {n} points per axis cannot hold a product of bandwidth {bandwidth} without aliasing")]
    Aliasing { n: usize, bandwidth: usize },

    #[error("time step {dt:e} exceeds the CFL limit; required dt <= {required:e}")]
    CflViolation { dt: f64, required: f64 },

    #[error("numerical blow-up at t = {time}: {reason}")]
    Blowup { time: f64, reason: String },

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("report serialization failed: {0}")]
    Serialize(String),
}

impl SqgError {
    pub fn config(msg: impl Into<String>) -> Self {
        SqgError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SqgError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            SqgError::Blowup { .. } | SqgError::CflViolation { .. } => 3,
            _ => 2,
        }
    }
}
