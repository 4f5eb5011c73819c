use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 1 or 2, got {0}")]
    Dimension(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("array of length {actual} does not match grid with {expected} entries")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("fields live on different grids: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("projection cutoff {requested} exceeds field cutoff {available}")]
    ProjectionCutoff { requested: usize, available: usize },

    #[error("cannot shrink window from L = {from} to L = {to}")]
    WindowShrink { from: f64, to: f64 },

    #[error("unknown {kind} id `{id}`")]
    UnknownId { kind: &'static str, id: String },

    #[error("evaluation failed at {point:?}: {reason}")]
    Evaluation { point: Vec<f64>, reason: String },

    #[error("non-finite value at step {step} (mode index {mode})")]
    NonFinite { step: usize, mode: usize },

    #[error("window extension budget of {max} exhausted at t = {t}")]
    ExtensionBudget { max: usize, t: f64 },

    #[error("reference resolution too coarse: {0}")]
    Reference(String),

    #[error("convergence table needs at least 3 usable rows, got {0}")]
    TooFewRows(usize),

    #[error("malformed {what}: {reason}")]
    Format { what: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
