use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AoiError {
    /// An input violated a precondition; `field` names the offending input.
    #[error("invalid {field}: {reason}")]
    Domain { field: String, reason: String },

    #[error("nodes {a} and {b} share the position ({x}, {y})")]
    CoincidentPositions { a: usize, b: usize, x: f64, y: f64 },

    #[error("{solver} supports at most {cap} nodes, got {m}; {advice}")]
    Capacity {
        solver: &'static str,
        cap: usize,
        m: usize,
        advice: &'static str,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed scenario document: {0}")]
    Parse(#[from] serde_json::Error),
}

impl AoiError {
    pub(crate) fn domain(field: impl Into<String>, reason: impl Into<String>) -> Self {
        AoiError::Domain {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, AoiError>;
