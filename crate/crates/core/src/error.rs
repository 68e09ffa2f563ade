use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shape, symmetry or orthonormality preconditions violated.
    #[error("structural error: {0}")]
    Structural(String),

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})"
    )]
    Convergence { sweeps: usize, residual: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("data error at row {row}: {message}")]
    Data { row: usize, message: String },

    #[error("column {requested:?} not found; available columns: {available:?}")]
    MissingColumn {
        requested: String,
        available: Vec<String>,
    },

    #[error("insufficient data: {what} has {available} points, need at least {required}")]
    InsufficientData {
        what: String,
        available: usize,
        required: usize,
    },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A motif that should be symmetric or skew under index reversal is neither.
    #[error("structure violation: {0}")]
    StructureViolation(String),

    #[error("ambiguous frequency assignment: {0}")]
    Ambiguity(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
