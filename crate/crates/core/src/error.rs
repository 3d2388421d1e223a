use std::path::PathBuf;

/// Errors produced by the counting, probability and bound routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what}: n = {n} is above the configured ceiling {ceiling}")]
    LimitExceeded {
        what: &'static str,
        n: usize,
        ceiling: usize,
    },
    #[error("k = {k} is outside [0, {max}]")]
    OutOfRange { k: usize, max: usize },
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("{0} is not an additive 2-base for n = {1}")]
    NotABase(String, usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cache {path}: record for n = {n} is inconsistent: {detail}")]
    CacheInconsistent {
        path: PathBuf,
        n: usize,
        detail: String,
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

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
