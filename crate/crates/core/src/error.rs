use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad file format: {0}")]
    Format(String),

    #[error("size mismatch: expected {expected} bytes, found {actual}")]
    SizeMismatch { expected: u64, actual: u64 },

    #[error("non-finite value at row {row}, col {col}")]
    NonFinite { row: usize, col: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("infeasible k: {k} clusters requested but only {distinct} distinct rows")]
    InfeasibleK { k: usize, distinct: usize },

    #[error("dimension mismatch: expected {expected}, found {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("misaligned streams: lengths {0:?}")]
    Misaligned(Vec<usize>),

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("stream '{name}': {source}")]
    Stream {
        name: String,
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

    /// Attaches a stream name to an error.
    pub fn in_stream(self, name: &str) -> Self {
        Error::Stream {
            name: name.to_string(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping stream-name wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stream { source, .. } => source.root(),
            other => other,
        }
    }
}
