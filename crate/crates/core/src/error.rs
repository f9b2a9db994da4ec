use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("structural error: {0}")]
    Structure(String),

    #[error("simulation diverged at t = {time} s")]
    Diverged { time: f64 },

    #[error("bounds error: {0}")]
    Bounds(String),

    #[error("invalid morphology: {0}")]
    InvalidSam(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("expected {expected} items, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("confidence interval undefined for fewer than 2 runs")]
    CiUndefined,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
