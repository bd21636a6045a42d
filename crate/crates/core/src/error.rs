use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: missing required column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: malformed CSV at row {row}: {message}")]
    Csv {
        path: PathBuf,
        row: u64,
        message: String,
    },

    #[error("invalid log format `{format}`: {reason}")]
    LogFormat { format: String, reason: String },

    #[error("invalid catalog: {0}")]
    Catalog(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("evaluation input mismatch: {0}")]
    Mismatch(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, err: &csv::Error) -> Self {
        let row = err.position().map(|p| p.line()).unwrap_or(0);
        Error::Csv {
            path: path.into(),
            row,
            message: err.to_string(),
        }
    }
}
