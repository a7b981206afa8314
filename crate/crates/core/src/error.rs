use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown sub-label {0:?}")]
    UnknownSubLabel(String),

    #[error("input shape mismatch: {0}")]
    InputShape(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("label {label} has {count} samples, fewer than k = {k}")]
    StratificationInfeasible { label: String, count: usize, k: usize },

    #[error("base model {0:?} could not be resolved")]
    ModelNotFound(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("extraction failed: {0}")]
    Extraction(String),

    #[error("event has no sentences")]
    EmptyEvent,

    #[error("unknown sample id {0:?}")]
    UnknownSample(String),

    #[error("cross-validation run carries no per-sample predictions")]
    MissingPredictions,

    #[error("audit order violated for {sample_id}: round {round} is not after {last}")]
    AuditOrder { sample_id: String, round: u32, last: u32 },

    #[error("model failure at sentence {index}: {message}")]
    Model { index: usize, message: String },

    #[error("transport error: {0}")]
    Transport(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse { context: context.into(), message: message.to_string() }
    }
}
