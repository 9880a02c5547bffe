use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("degenerate subcurve: start and end parameters coincide")]
    DegenerateSubcurve,

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("infeasible cover: point {param} on curve {curve} is not covered by any candidate")]
    Infeasible { curve: usize, param: String },

    #[error("{path}: row {row}, column {column:?}: {message}")]
    Data {
        path: PathBuf,
        row: usize,
        column: Option<String>,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
