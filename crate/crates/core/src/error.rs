use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported set: {0}")]
    UnsupportedSet(String),

    #[error("non-finite value at step {step}")]
    NonFiniteValue { step: usize },

    #[error("difference orbit norm increased at step {step}: {before} -> {after}")]
    MonotonicityViolation { step: usize, before: f64, after: f64 },

    #[error("operator is not certified averaged ({0}); pass the heuristic override to run anyway")]
    CertificateRequired(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(vec![msg.into()])
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
