//! Experiment configuration, loadable from TOML.
//!
//! ```toml
//! algorithms = ["dp", "ga", "greedy"]
//! objectives = ["max-aoi", "ave-aoi"]
//!
//! [scenario.generate]
//! m = 14
//! seed = 7
//! radius_m = 1000.0
//!
//! [ga]
//! generations = 1000
//!
//! [sweep]
//! m_values = [5, 6, 7, 8, 9]
//! trials = 10
//! base_seed = 1
//!
//! [output]
//! dir = "out"
//! format = "csv"
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use aoi_core::scenario_file::{DEFAULT_PACKET_BITS, DEFAULT_RADIUS_M, DEFAULT_TX_POWER_W};
use aoi_core::{Algorithm, GaParams, ObjectiveKind, RadioConfig, BRUTE_MAX_NODES, DP_MAX_NODES};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSpec {
    pub m: usize,
    pub seed: u64,
    pub radius_m: f64,
    pub tx_power_w: f64,
    pub packet_bits: f64,
    pub radio: RadioConfig,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            m: 14,
            seed: 0,
            radius_m: DEFAULT_RADIUS_M,
            tx_power_w: DEFAULT_TX_POWER_W,
            packet_bits: DEFAULT_PACKET_BITS,
            radio: RadioConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioSource {
    File(PathBuf),
    Generate(GeneratorSpec),
}

impl Default for ScenarioSource {
    fn default() -> Self {
        ScenarioSource::Generate(GeneratorSpec::default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub m_values: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            m_values: (5..=9).collect(),
            trials: 10,
            base_seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Format of `solve` and `sweep` row files. Curves are always CSV.
    pub format: OutputFormat,
    /// Record solver wall time in output files. Off by default so reruns
    /// stay byte-identical.
    pub timing: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: PathBuf::from("out"),
            format: OutputFormat::Json,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSource,
    pub algorithms: Vec<Algorithm>,
    pub objectives: Vec<ObjectiveKind>,
    pub ga: GaParams,
    pub sweep: Option<SweepSpec>,
    pub output: OutputSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: ScenarioSource::default(),
            algorithms: vec![Algorithm::Dp, Algorithm::Ga, Algorithm::Greedy],
            objectives: ObjectiveKind::ALL.to_vec(),
            ga: GaParams::default(),
            sweep: None,
            output: OutputSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| BenchError::ConfigFile {
            path: path.to_path_buf(),
            source: Box::new(e),
        })?;
        Self::from_toml(&text).map_err(|e| BenchError::ConfigFile {
            path: path.to_path_buf(),
            source: Box::new(e),
        })
    }

    /// Algorithms deduplicated, in canonical order (dp, ga, greedy, brute).
    pub fn algorithm_set(&self) -> Vec<Algorithm> {
        let mut algos = self.algorithms.clone();
        algos.sort();
        algos.dedup();
        algos
    }

    /// Objectives deduplicated, max-aoi first.
    pub fn objective_set(&self) -> Vec<ObjectiveKind> {
        let mut kinds = self.objectives.clone();
        kinds.sort();
        kinds.dedup();
        kinds
    }

    /// Checks everything that does not need the scenario loaded.
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(BenchError::Config("select at least one algorithm".into()));
        }
        if self.objectives.is_empty() {
            return Err(BenchError::Config("select at least one objective".into()));
        }
        if self.algorithms.contains(&Algorithm::Ga) {
            self.ga.validate()?;
        }
        if let (ScenarioSource::Generate(spec), None) = (&self.scenario, &self.sweep) {
            if spec.m == 0 {
                return Err(BenchError::Config("generator m must be at least 1".into()));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.m_values.is_empty() || sweep.m_values.contains(&0) {
                return Err(BenchError::Config("sweep needs a non-empty list of positive m values".into()));
            }
            if sweep.trials == 0 {
                return Err(BenchError::Config("sweep needs at least one trial per m".into()));
            }
        }
        Ok(())
    }

    /// Rejects exact solvers on instances beyond their caps.
    pub fn check_capacity(&self, m: usize) -> Result<()> {
        let algos = self.algorithm_set();
        if algos.contains(&Algorithm::Dp) && m > DP_MAX_NODES {
            return Err(BenchError::Config(format!(
                "dp supports at most {DP_MAX_NODES} nodes but M = {m}; use --algo ga instead"
            )));
        }
        if algos.contains(&Algorithm::Brute) && m > BRUTE_MAX_NODES {
            return Err(BenchError::Config(format!(
                "brute supports at most {BRUTE_MAX_NODES} nodes but M = {m}; use --algo dp or --algo ga instead"
            )));
        }
        Ok(())
    }
}
