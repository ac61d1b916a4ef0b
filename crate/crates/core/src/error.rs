use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: parse error at {location}: {message}")]
    Parse {
        path: PathBuf,
        location: String,
        message: String,
    },

    #[error("non-finite coordinate in record {index}")]
    NonFiniteCoordinate { index: usize },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("direction vector has zero length")]
    ZeroDirection,

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("point clouds differ in size ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("{size} points exceeds the exact assignment cap of {cap}")]
    OverCap { size: usize, cap: usize },

    #[error("projected index and path grid were built for different frames")]
    FrameMismatch,

    #[error("tolerance values must be strictly increasing")]
    Unsorted,

    #[error("sweep series is empty")]
    EmptySeries,

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
        if value > 0.0 {
            Ok(())
        } else {
            Err(Error::NonPositive { name, value })
        }
    }
}
