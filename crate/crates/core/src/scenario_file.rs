//! JSON scenario documents.
//!
//! ```json
//! {
//!   "data_center": { "x": 0.0, "y": 0.0 },
//!   "radio": {
//!     "bandwidth_hz": 5000000.0,
//!     "ref_gain_db": -60.0,
//!     "altitude_m": 50.0,
//!     "noise_power_dbm": -110.0,
//!     "speed_mps": 20.0
//!   },
//!   "nodes": [ { "id": 1, "x": 100.0, "y": 0.0, "tx_power_w": 0.1, "packet_bits": 1000000.0 } ]
//! }
//! ```
//!
//! `ref_gain_db` and `noise_power_dbm` are converted to linear units when a
//! document becomes a [`Scenario`]. Documents keep the decibel values they
//! were loaded with, so load followed by save writes the same values back.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{AoiError, Result};
use crate::net::{dbm_to_watts, db_to_linear, linear_to_db, watts_to_dbm, Point, RadioParams, Scenario, SensorNode};

pub const DEFAULT_BANDWIDTH_HZ: f64 = 5e6;
pub const DEFAULT_REF_GAIN_DB: f64 = -60.0;
pub const DEFAULT_ALTITUDE_M: f64 = 50.0;
pub const DEFAULT_NOISE_POWER_DBM: f64 = -110.0;
pub const DEFAULT_SPEED_MPS: f64 = 20.0;
pub const DEFAULT_TX_POWER_W: f64 = 0.1;
pub const DEFAULT_PACKET_BITS: f64 = 1e6;
pub const DEFAULT_RADIUS_M: f64 = 1000.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioConfig {
    pub bandwidth_hz: f64,
    pub ref_gain_db: f64,
    pub altitude_m: f64,
    pub noise_power_dbm: f64,
    pub speed_mps: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            bandwidth_hz: DEFAULT_BANDWIDTH_HZ,
            ref_gain_db: DEFAULT_REF_GAIN_DB,
            altitude_m: DEFAULT_ALTITUDE_M,
            noise_power_dbm: DEFAULT_NOISE_POWER_DBM,
            speed_mps: DEFAULT_SPEED_MPS,
        }
    }
}

impl RadioConfig {
    pub fn to_params(&self) -> Result<RadioParams> {
        RadioParams::new(
            self.bandwidth_hz,
            db_to_linear(self.ref_gain_db),
            self.altitude_m,
            dbm_to_watts(self.noise_power_dbm),
            self.speed_mps,
        )
    }

    pub fn from_params(radio: &RadioParams) -> Self {
        RadioConfig {
            bandwidth_hz: radio.bandwidth_hz(),
            ref_gain_db: linear_to_db(radio.ref_gain()),
            altitude_m: radio.altitude_m(),
            noise_power_dbm: watts_to_dbm(radio.noise_power_w()),
            speed_mps: radio.speed_mps(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub tx_power_w: f64,
    pub packet_bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub data_center: Point,
    pub radio: RadioConfig,
    pub nodes: Vec<NodeRecord>,
}

impl ScenarioDocument {
    /// Document for `scenario` that records `radio` verbatim.
    ///
    /// `radio` should be the configuration the scenario's linear parameters
    /// were built from.
    pub fn with_radio(scenario: &Scenario, radio: RadioConfig) -> Self {
        ScenarioDocument {
            data_center: scenario.data_center(),
            radio,
            nodes: scenario
                .nodes()
                .iter()
                .map(|n| NodeRecord {
                    id: n.id,
                    x: n.position.x,
                    y: n.position.y,
                    tx_power_w: n.tx_power_w,
                    packet_bits: n.packet_bits,
                })
                .collect(),
        }
    }

    /// Document for `scenario`, converting its linear gains back to decibels.
    pub fn from_scenario(scenario: &Scenario) -> Self {
        Self::with_radio(scenario, RadioConfig::from_params(scenario.radio()))
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        let nodes = self
            .nodes
            .iter()
            .map(|r| SensorNode {
                id: r.id,
                position: Point::new(r.x, r.y),
                tx_power_w: r.tx_power_w,
                packet_bits: r.packet_bits,
            })
            .collect();
        Scenario::new(self.data_center, nodes, self.radio.to_params()?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scenario documents always serialize");
        text.push('\n');
        text
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| AoiError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let doc = Self::from_json(&text)?;
        doc.to_scenario()?;
        Ok(doc)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|source| AoiError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
