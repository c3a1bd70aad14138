use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the matrixgt library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters or scenario settings.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed file contents.
    #[error("format error: {0}")]
    Format(String),

    /// A file shorter than its header announces.
    #[error("truncated data: expected {expected} payload bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    /// A point at or behind the camera plane.
    #[error("point is behind the camera (z = {0})")]
    BehindCamera(f64),

    /// Inputs that are individually well formed but inconsistent with each other.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach a path to a format error raised while decoding a file.
    pub fn in_file(self, path: &std::path::Path) -> Self {
        match self {
            Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
            Error::Truncated { expected, found } => Error::Format(format!(
                "{}: truncated payload (expected {expected} bytes, found {found})",
                path.display()
            )),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
