//! Python bindings: `import aoi_traj`.
//!
//! Objectives are passed as `"max-aoi"` / `"ave-aoi"`, algorithms as
//! `"dp"`, `"ga"`, `"greedy"` or `"brute"`. Library errors surface as
//! `ValueError`, file errors as `OSError`.

use std::path::PathBuf;

use aoi_core::heuristic::ga;
use aoi_core::{AoiError, ObjectiveKind, RadioConfig, ScenarioDocument};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn to_py(err: AoiError) -> PyErr {
    match err {
        AoiError::Io { .. } => PyOSError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn kind(objective: &str) -> PyResult<ObjectiveKind> {
    objective.parse().map_err(to_py)
}

/// Data center, sensor nodes and radio settings.
#[pyclass(frozen, name = "Scenario", module = "aoi_traj")]
struct PyScenario {
    document: ScenarioDocument,
    scenario: aoi_core::Scenario,
}

impl PyScenario {
    fn from_document(document: ScenarioDocument) -> PyResult<Self> {
        let scenario = document.to_scenario().map_err(to_py)?;
        Ok(PyScenario { document, scenario })
    }
}

#[pymethods]
impl PyScenario {
    /// Uniform random placement of the data center and `m` nodes in a disk.
    #[staticmethod]
    #[pyo3(signature = (
        m,
        seed = 0,
        radius_m = 1000.0,
        tx_power_w = 0.1,
        packet_bits = 1e6,
        bandwidth_hz = 5e6,
        ref_gain_db = -60.0,
        altitude_m = 50.0,
        noise_power_dbm = -110.0,
        speed_mps = 20.0,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn random(
        m: usize,
        seed: u64,
        radius_m: f64,
        tx_power_w: f64,
        packet_bits: f64,
        bandwidth_hz: f64,
        ref_gain_db: f64,
        altitude_m: f64,
        noise_power_dbm: f64,
        speed_mps: f64,
    ) -> PyResult<Self> {
        let radio = RadioConfig { bandwidth_hz, ref_gain_db, altitude_m, noise_power_dbm, speed_mps };
        let scenario = aoi_core::random_scenario(m, radius_m, radio.to_params().map_err(to_py)?, tx_power_w, packet_bits, seed)
            .map_err(to_py)?;
        Self::from_document(ScenarioDocument::with_radio(&scenario, radio))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Self::from_document(ScenarioDocument::from_json(text).map_err(to_py)?)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Self::from_document(ScenarioDocument::load(&path).map_err(to_py)?)
    }

    fn to_json(&self) -> String {
        self.document.to_json()
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.document.save(&path).map_err(to_py)
    }

    #[getter]
    fn m(&self) -> usize {
        self.scenario.m()
    }

    #[getter]
    fn data_center(&self) -> (f64, f64) {
        let p = self.scenario.data_center();
        (p.x, p.y)
    }

    /// Node positions, node 1 first.
    #[getter]
    fn positions(&self) -> Vec<(f64, f64)> {
        self.scenario.nodes().iter().map(|n| (n.position.x, n.position.y)).collect()
    }

    fn transit_matrix(&self) -> PyResult<PyTransitMatrix> {
        Ok(PyTransitMatrix(aoi_core::transit_matrix(&self.scenario).map_err(to_py)?))
    }

    fn __repr__(&self) -> String {
        format!("Scenario(m={})", self.scenario.m())
    }
}

/// Square cost matrix over the data center (index 0) and nodes 1..M.
#[pyclass(frozen, name = "TransitMatrix", module = "aoi_traj")]
struct PyTransitMatrix(aoi_core::TransitCostMatrix);

#[pymethods]
impl PyTransitMatrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyTransitMatrix(aoi_core::TransitCostMatrix::from_rows(&rows).map_err(to_py)?))
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        let m = self.0.m();
        if i > m || j > m || i == j {
            return Err(PyValueError::new_err(format!("need distinct indices in 0..={m}, got ({i}, {j})")));
        }
        Ok(self.0.get(i, j))
    }

    fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0.to_rows()
    }

    fn __repr__(&self) -> String {
        format!("TransitMatrix(m={})", self.0.m())
    }
}

/// Visit order over node ids 1..M.
#[pyclass(frozen, eq, name = "Trajectory", module = "aoi_traj")]
#[derive(PartialEq)]
struct PyTrajectory(aoi_core::Trajectory);

#[pymethods]
impl PyTrajectory {
    #[new]
    fn new(order: Vec<usize>) -> PyResult<Self> {
        Ok(PyTrajectory(aoi_core::Trajectory::new(order).map_err(to_py)?))
    }

    #[getter]
    fn order(&self) -> Vec<usize> {
        self.0.order().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.m()
    }

    fn __repr__(&self) -> String {
        format!("Trajectory({:?})", self.0.order())
    }
}

/// Per-position ages and the two objectives for one trajectory.
#[pyclass(frozen, get_all, name = "AoiReport", module = "aoi_traj")]
struct PyAoiReport {
    ages: Vec<f64>,
    weighted_partials: Vec<f64>,
    max_age: f64,
    avg_age: f64,
    timestamps: Vec<f64>,
    mission_end: f64,
}

#[pymethods]
impl PyAoiReport {
    fn __repr__(&self) -> String {
        format!("AoiReport(max_age={}, avg_age={})", self.max_age, self.avg_age)
    }
}

#[pyclass(frozen, get_all, name = "SolveResult", module = "aoi_traj")]
struct PySolveResult {
    trajectory: Vec<usize>,
    objective_value: f64,
    objective: String,
    algorithm: String,
    wall_time: f64,
}

impl From<aoi_core::SolveResult> for PySolveResult {
    fn from(r: aoi_core::SolveResult) -> Self {
        PySolveResult {
            trajectory: r.trajectory.into_order(),
            objective_value: r.objective_value,
            objective: r.objective_kind.to_string(),
            algorithm: r.algorithm.to_string(),
            wall_time: r.wall_time.as_secs_f64(),
        }
    }
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!(
            "SolveResult(algorithm={:?}, objective={:?}, objective_value={}, trajectory={:?})",
            self.algorithm, self.objective, self.objective_value, self.trajectory
        )
    }
}

/// Scores a trajectory. Without `takeoff_leg` the data-center leg from
/// the matrix is used.
#[pyfunction]
#[pyo3(signature = (trajectory, eta, takeoff_leg = None))]
fn evaluate(trajectory: &PyTrajectory, eta: &PyTransitMatrix, takeoff_leg: Option<f64>) -> PyResult<PyAoiReport> {
    let r = match takeoff_leg {
        Some(t) => aoi_core::evaluate(&trajectory.0, &eta.0, t),
        None => aoi_core::evaluate_mission(&trajectory.0, &eta.0),
    }
    .map_err(to_py)?;
    Ok(PyAoiReport {
        mission_end: r.mission_end,
        ages: r.ages,
        weighted_partials: r.weighted_partials,
        max_age: r.max_age,
        avg_age: r.avg_age,
        timestamps: r.timestamps,
    })
}

#[pyfunction]
fn objective_value(trajectory: &PyTrajectory, eta: &PyTransitMatrix, objective: &str) -> PyResult<f64> {
    aoi_core::objective_value(&trajectory.0, &eta.0, kind(objective)?).map_err(to_py)
}

/// Exact subset DP, up to 24 nodes.
#[pyfunction]
#[pyo3(signature = (eta, objective = "max-aoi"))]
fn dp(eta: &PyTransitMatrix, objective: &str) -> PyResult<PySolveResult> {
    Ok(aoi_core::dp(&eta.0, kind(objective)?).map_err(to_py)?.into())
}

/// Exhaustive search, up to 10 nodes.
#[pyfunction]
#[pyo3(signature = (eta, objective = "max-aoi"))]
fn brute_force(eta: &PyTransitMatrix, objective: &str) -> PyResult<PySolveResult> {
    Ok(aoi_core::brute_force(&eta.0, kind(objective)?).map_err(to_py)?.into())
}

/// Backward nearest-neighbour tour; `objective` only selects the score.
#[pyfunction]
#[pyo3(signature = (eta, objective = "max-aoi"))]
fn greedy(eta: &PyTransitMatrix, objective: &str) -> PyResult<PySolveResult> {
    Ok(aoi_core::greedy_solve(&eta.0, kind(objective)?).into())
}

#[pyfunction]
#[pyo3(signature = (
    eta,
    objective = "max-aoi",
    *,
    population_size = 1000,
    generations = 10000,
    acceleration = 2.0,
    selection_threshold = 0.8,
    mutation_prob = 0.01,
    epsilon = 1e-9,
    mutation_swaps = 3,
    elitism = 1,
    seed = 0,
    seed_with_greedy = false,
))]
#[allow(clippy::too_many_arguments)]
fn genetic(
    py: Python<'_>,
    eta: &PyTransitMatrix,
    objective: &str,
    population_size: usize,
    generations: usize,
    acceleration: f64,
    selection_threshold: f64,
    mutation_prob: f64,
    epsilon: f64,
    mutation_swaps: usize,
    elitism: usize,
    seed: u64,
    seed_with_greedy: bool,
) -> PyResult<PySolveResult> {
    let params = aoi_core::GaParams {
        population_size,
        generations,
        acceleration,
        selection_threshold,
        mutation_prob,
        epsilon,
        mutation_swaps,
        elitism,
        seed,
        seed_with_greedy,
    };
    let kind = kind(objective)?;
    let result = py.detach(|| aoi_core::ga_solve(&eta.0, kind, &params));
    Ok(result.map_err(to_py)?.into())
}

/// Shannon rate of the line-of-sight uplink in bit/s.
#[pyfunction]
#[pyo3(signature = (
    tx_power_w = 0.1,
    bandwidth_hz = 5e6,
    ref_gain_db = -60.0,
    altitude_m = 50.0,
    noise_power_dbm = -110.0,
))]
fn uplink_rate(tx_power_w: f64, bandwidth_hz: f64, ref_gain_db: f64, altitude_m: f64, noise_power_dbm: f64) -> PyResult<f64> {
    let radio = RadioConfig { bandwidth_hz, ref_gain_db, altitude_m, noise_power_dbm, ..RadioConfig::default() };
    aoi_core::uplink_rate(&radio.to_params().map_err(to_py)?, tx_power_w).map_err(to_py)
}

/// Normalized GA fitness of a list of objective values.
#[pyfunction]
#[pyo3(signature = (lengths, alpha = 2.0, eps = 1e-9))]
fn fitness(lengths: Vec<f64>, alpha: f64, eps: f64) -> Vec<f64> {
    ga::fitness(&lengths, alpha, eps)
}

/// Partially mapped crossover with 1-based inclusive cut points.
#[pyfunction]
fn pmx_crossover(a: &PyTrajectory, b: &PyTrajectory, cut1: usize, cut2: usize) -> PyResult<(PyTrajectory, PyTrajectory)> {
    let (x, y) = ga::pmx_crossover(&a.0, &b.0, cut1, cut2).map_err(to_py)?;
    Ok((PyTrajectory(x), PyTrajectory(y)))
}

/// Applies `swaps` random transpositions drawn from a seeded generator.
#[pyfunction]
#[pyo3(signature = (trajectory, swaps = 3, seed = 0))]
fn mutate(trajectory: &PyTrajectory, swaps: usize, seed: u64) -> PyTrajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PyTrajectory(ga::mutate(&trajectory.0, swaps, &mut rng))
}

#[pymodule]
fn aoi_traj(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyTransitMatrix>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyAoiReport>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(objective_value, m)?)?;
    m.add_function(wrap_pyfunction!(dp, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(greedy, m)?)?;
    m.add_function(wrap_pyfunction!(genetic, m)?)?;
    m.add_function(wrap_pyfunction!(uplink_rate, m)?)?;
    m.add_function(wrap_pyfunction!(fitness, m)?)?;
    m.add_function(wrap_pyfunction!(pmx_crossover, m)?)?;
    m.add_function(wrap_pyfunction!(mutate, m)?)?;
    m.add("DP_MAX_NODES", aoi_core::DP_MAX_NODES)?;
    m.add("BRUTE_MAX_NODES", aoi_core::BRUTE_MAX_NODES)?;
    Ok(())
}
