//! Error type shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, RiskError>;

#[derive(Debug, Error)]
pub enum RiskError {
    /// File-system level failure; callers map this to a distinct exit code.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file content, with the 1-based line it came from.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Structurally well-formed input that violates a domain invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A numeric precondition does not hold (zero dispersion, bad probability, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Conditional query matched too few observations to be meaningful.
    #[error("insufficient conditional support: {found} pairs in window (minimum {required})")]
    InsufficientSupport { found: usize, required: usize },
}

impl RiskError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RiskError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        RiskError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for failures caused by the file system rather than file content.
    pub fn is_io(&self) -> bool {
        matches!(self, RiskError::Io { .. })
    }
}
