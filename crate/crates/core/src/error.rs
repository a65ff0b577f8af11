use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library and mapped onto CLI exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A homogeneous point with (near) zero last coordinate was dehomogenized.
    #[error("point at infinity cannot be dehomogenized")]
    PointAtInfinity,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("image error on {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input rather than infrastructure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_) | Error::PointAtInfinity | Error::Json { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
