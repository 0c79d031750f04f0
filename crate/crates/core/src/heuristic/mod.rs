//! Solvers for instances beyond the exact DP: a genetic algorithm and the
//! greedy baseline.

pub mod ga;
pub mod greedy;

pub use ga::{fitness, ga_run, ga_solve, mutate, pmx_crossover, GaParams, GaRun, Population};
pub use greedy::{greedy_solve, greedy_trajectory};
