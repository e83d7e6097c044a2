use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed header {path}: {msg}")]
    Header { path: PathBuf, msg: String },

    #[error("payload size mismatch: header declares {expected} bytes, payload has {actual}")]
    SizeMismatch { expected: u64, actual: u64 },

    #[error("non-finite value at (row {row}, col {col}, band {band})")]
    NonFinite { row: usize, col: usize, band: usize },

    #[error("label file: {0}")]
    Labels(String),

    #[error("class {class} has {available} labeled pixels, {required} requested for training")]
    InsufficientClass {
        class: usize,
        available: usize,
        required: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("Cholesky factorization failed after jitter escalation (smallest eigenvalue estimate {min_eigenvalue:e})")]
    Cholesky { min_eigenvalue: f64 },

    #[error("model file {path}: {msg}")]
    Model { path: PathBuf, msg: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

/// Tags the error of a result with the pipeline stage that produced it.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.in_stage(stage))
    }
}
