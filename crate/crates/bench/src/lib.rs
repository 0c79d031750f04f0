//! Experiment harness: scenario generation, solver dispatch and CSV/JSON
//! output for the `aoi-bench` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod rows;
pub mod seeds;

pub use commands::{cmd_curves, cmd_gen, cmd_solve, cmd_sweep, CommandOutput};
pub use config::{ExperimentConfig, GeneratorSpec, OutputFormat, ScenarioSource, SweepSpec};
pub use error::{BenchError, Result};
pub use rows::{ResultRow, SweepSummary};
