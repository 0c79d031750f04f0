use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::aoi::{ObjectiveKind, Trajectory};
use crate::error::{AoiError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dp,
    Ga,
    Greedy,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Dp, Algorithm::Ga, Algorithm::Greedy, Algorithm::Brute];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Dp => "dp",
            Algorithm::Ga => "ga",
            Algorithm::Greedy => "greedy",
            Algorithm::Brute => "brute",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = AoiError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| {
                AoiError::domain(
                    "algorithm",
                    format!("unknown algorithm {s:?}; expected dp, ga, greedy or brute"),
                )
            })
    }
}

/// Output of any solver. `wall_time` is informational and is the only
/// field that varies between identical runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub trajectory: Trajectory,
    pub objective_value: f64,
    pub objective_kind: ObjectiveKind,
    pub algorithm: Algorithm,
    pub wall_time: Duration,
}
