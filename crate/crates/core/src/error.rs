use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid narrative order {0:?}: not a permutation of 1..n")]
    InvalidOrder(Vec<usize>),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid story {id:?}: {reason}")]
    InvalidStory { id: String, reason: String },

    #[error("row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("line {line}: parse: {message}")]
    Jsonl { line: usize, message: String },

    #[error("unknown record kind {0:?}")]
    UnknownKind(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid coreference annotation for {id:?}: {reason}")]
    Coref { id: String, reason: String },

    #[error("encoding: {0}")]
    Encoding(String),

    #[error("missing {what} for {ids:?}")]
    MissingSidecar { what: String, ids: Vec<String> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("metric: {0}")]
    Metric(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
