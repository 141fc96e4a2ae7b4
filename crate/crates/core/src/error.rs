use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("coefficient vector of length {len} is not (L+1)^2 for any L")]
    BadCoefficientLength { len: usize },

    #[error("quadrature exact to degree {exactness} cannot resolve products up to degree {required}")]
    QuadratureTooLow { exactness: usize, required: usize },

    #[error("mesh has no triangles")]
    EmptyMesh,

    #[error("frame has no points")]
    EmptyFrame,

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("voxel grid does not cover the compared shapes")]
    GridTooSmall,

    #[error("covariance square root failed after jitter escalation")]
    CholeskyFailed,

    #[error("innovation covariance is singular")]
    SingularInnovation,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
