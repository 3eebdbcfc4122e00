use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("tree with {vertices} vertices exceeds the enumeration limit of {limit}")]
    SizeExceeded { vertices: u128, limit: u128 },

    #[error("instance too large for exact enumeration: {0}")]
    Infeasible(String),

    #[error("fork depth {k} out of range for height {h}")]
    ForkOutOfRange { k: usize, h: usize },

    #[error("path lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("trial mode {found} cannot be used here (expected {expected})")]
    ModeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("expression error at offset {offset}: {msg}")]
    Expr { offset: usize, msg: String },

    #[error("{path}:{line}: {msg}")]
    Config {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors raised by a size or feasibility guard.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::SizeExceeded { .. } | Error::Infeasible(_))
    }
}
