use thiserror::Error;

/// Errors surfaced by the algebra kernel and the layers built on it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("torus mismatch: {0}")]
    TorusMismatch(String),
    #[error("resolution exceeds bound {bound}")]
    ResolutionTooLong { bound: usize },
    #[error("lattice map is not surjective over Z")]
    NotSurjective,
    #[error("character value must be nonzero")]
    ZeroValue,
    #[error("monodromy matrices do not commute")]
    NonCommuting,
    #[error("monodromy matrix is not invertible")]
    NonInvertible,
    #[error("map does not commute with the differentials")]
    NotAChainMap,
    #[error("module is not reflexive")]
    NotReflexive,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
