//! Age-of-information-optimal tour planning for a data-collecting UAV.
//!
//! A collector takes off from a data center, visits every ground sensor
//! once, uploads each node's packet while hovering, and flies home. The
//! [`net`] module turns geometry and a line-of-sight link budget into the
//! transit-cost matrix `eta`; [`aoi`] scores a visit order; [`exact`] and
//! [`heuristic`] search for the order minimising the oldest or the mean age.

pub mod aoi;
pub mod error;
pub mod exact;
pub mod heuristic;
pub mod net;
pub mod scenario_file;
pub mod solution;

pub use aoi::{evaluate, evaluate_mission, objective_value, AoiReport, ObjectiveKind, Trajectory};
pub use error::{AoiError, Result};
pub use exact::{brute_force, dp, dp_ave_aoi, dp_max_aoi, DpTable, BRUTE_MAX_NODES, DP_MAX_NODES};
pub use heuristic::{ga_solve, greedy_solve, GaParams};
pub use net::{random_scenario, transit_matrix, uplink_rate, upload_time, Point, RadioParams, Scenario, SensorNode, TransitCostMatrix};
pub use scenario_file::{RadioConfig, ScenarioDocument};
pub use solution::{Algorithm, SolveResult};
