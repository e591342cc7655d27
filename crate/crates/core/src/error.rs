use thiserror::Error;

use crate::robust::LagrangeTrace;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unbounded: {0}")]
    Unbounded(String),

    #[error("lifted dimension {dim} exceeds enumeration cap {cap}; supply vertex hints or raise the cap")]
    DimensionCap { dim: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("cutting-plane loop did not stop within {limit} iterations")]
    IterationLimit {
        limit: usize,
        trace: Box<LagrangeTrace>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
