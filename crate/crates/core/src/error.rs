use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver, its oracles and its IO helpers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("order dimension mismatch: {left} vs {right}")]
    OrderDimension { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("non-finite entry at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("objective component {component} evaluated to non-finite value {value}")]
    Evaluation { component: usize, value: f64 },

    #[error("component {component} has no subgradient selection at this point")]
    Selection { component: usize },

    #[error("component index {index} out of range (m = {m})")]
    ComponentIndex { index: usize, m: usize },

    #[error("invalid problem construction: {0}")]
    Construction(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("method mismatch: {0}")]
    MethodMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
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
