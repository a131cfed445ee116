use thiserror::Error;

use crate::sim::RunMetrics;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("protocol violation at node {node} in round {round}: {message}")]
    ProtocolViolation {
        node: u64,
        round: u64,
        message: String,
    },

    #[error("round limit {round_limit} exhausted during `{tag}` before global halt")]
    Timeout {
        tag: String,
        round_limit: u64,
        metrics: Box<RunMetrics>,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
