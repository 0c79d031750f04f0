use std::path::PathBuf;

use aoi_core::AoiError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] AoiError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot read config {path}: {source}")]
    ConfigFile {
        path: PathBuf,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),

    /// A result row whose stored objective disagrees with re-evaluation.
    #[error("{algorithm}/{objective} on {scenario_id}: stored objective {stored} but trajectory evaluates to {replayed}")]
    Inconsistent {
        scenario_id: String,
        algorithm: String,
        objective: String,
        stored: f64,
        replayed: f64,
    },
}

pub type Result<T> = std::result::Result<T, BenchError>;
