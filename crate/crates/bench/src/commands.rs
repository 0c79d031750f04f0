//! The four harness commands. Each validates its whole configuration,
//! solves everything in memory, and only then writes output files, so a
//! failed command leaves no result file behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use aoi_core::exact::{brute_force, dp};
use aoi_core::{ga_solve, greedy_solve, random_scenario, transit_matrix, Algorithm, GaParams, ObjectiveKind, Scenario, ScenarioDocument, SolveResult, TransitCostMatrix};
use rayon::prelude::*;
use tempfile::NamedTempFile;

use crate::config::{ExperimentConfig, GeneratorSpec, OutputFormat, ScenarioSource};
use crate::error::{BenchError, Result};
use crate::rows::{curves_csv, rows_csv, rows_json, summarize, summary_csv, ResultRow, SweepSummary};
use crate::seeds::{ga_trial_seed, trial_seed};

pub const SOLVE_STEM: &str = "solve";
pub const SWEEP_STEM: &str = "sweep";
pub const SWEEP_SUMMARY_FILE: &str = "sweep_summary.csv";
pub const CURVES_FILE: &str = "curves.csv";

/// A scenario ready to solve.
#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub id: String,
    pub seed: Option<u64>,
    pub document: ScenarioDocument,
    pub scenario: Scenario,
}

#[derive(Clone, Debug, Default)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SweepSummary>,
}

pub fn generate(spec: &GeneratorSpec) -> Result<ScenarioDocument> {
    if spec.m == 0 {
        return Err(BenchError::Config("m must be at least 1".into()));
    }
    let radio = spec.radio.to_params()?;
    let scenario = random_scenario(spec.m, spec.radius_m, radio, spec.tx_power_w, spec.packet_bits, spec.seed)?;
    Ok(ScenarioDocument::with_radio(&scenario, spec.radio))
}

pub fn load_scenario(source: &ScenarioSource) -> Result<LoadedScenario> {
    match source {
        ScenarioSource::File(path) => {
            let document = ScenarioDocument::load(path)?;
            let scenario = document.to_scenario()?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into());
            Ok(LoadedScenario { id, seed: None, document, scenario })
        }
        ScenarioSource::Generate(spec) => {
            let document = generate(spec)?;
            let scenario = document.to_scenario()?;
            Ok(LoadedScenario {
                id: format!("m{}-seed{}", spec.m, spec.seed),
                seed: Some(spec.seed),
                document,
                scenario,
            })
        }
    }
}

pub fn solve_one(eta: &TransitCostMatrix, algorithm: Algorithm, kind: ObjectiveKind, ga: &GaParams) -> Result<SolveResult> {
    Ok(match algorithm {
        Algorithm::Dp => dp(eta, kind)?,
        Algorithm::Brute => brute_force(eta, kind)?,
        Algorithm::Ga => ga_solve(eta, kind, ga)?,
        Algorithm::Greedy => greedy_solve(eta, kind),
    })
}

/// One row per `(algorithm, objective)`, algorithms outermost, in the
/// configuration's canonical order.
pub fn solve_scenario(
    cfg: &ExperimentConfig,
    scenario_id: &str,
    trial: Option<usize>,
    seed: Option<u64>,
    eta: &TransitCostMatrix,
    ga: &GaParams,
) -> Result<Vec<ResultRow>> {
    let jobs: Vec<(Algorithm, ObjectiveKind)> = cfg
        .algorithm_set()
        .into_iter()
        .flat_map(|a| cfg.objective_set().into_iter().map(move |o| (a, o)))
        .collect();
    jobs.par_iter()
        .map(|&(algorithm, kind)| {
            let result = solve_one(eta, algorithm, kind, ga)?;
            ResultRow::from_solve(scenario_id, trial, seed, &result, eta, cfg.output.timing)
        })
        .collect()
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |source| BenchError::Io { path: path.to_path_buf(), source };
    fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn rows_file(cfg: &ExperimentConfig, stem: &str, rows: &[ResultRow]) -> Result<(PathBuf, Vec<u8>)> {
    Ok(match cfg.output.format {
        OutputFormat::Json => (cfg.output.dir.join(format!("{stem}.json")), rows_json(rows)?),
        OutputFormat::Csv => (cfg.output.dir.join(format!("{stem}.csv")), rows_csv(rows)?),
    })
}

fn write_all(files: Vec<(PathBuf, Vec<u8>)>) -> Result<Vec<PathBuf>> {
    files
        .into_iter()
        .map(|(path, bytes)| write_atomic(&path, &bytes).map(|_| path))
        .collect()
}

/// Generates a scenario and writes it to `out`.
pub fn cmd_gen(spec: &GeneratorSpec, out: &Path) -> Result<ScenarioDocument> {
    let document = generate(spec)?;
    write_atomic(out, document.to_json().as_bytes())?;
    Ok(document)
}

fn single_scenario_rows(cfg: &ExperimentConfig) -> Result<(LoadedScenario, Vec<ResultRow>)> {
    cfg.validate()?;
    let loaded = load_scenario(&cfg.scenario)?;
    cfg.check_capacity(loaded.scenario.m())?;
    let eta = transit_matrix(&loaded.scenario)?;
    let rows = solve_scenario(cfg, &loaded.id, None, loaded.seed, &eta, &cfg.ga)?;
    Ok((loaded, rows))
}

/// Solves one scenario with every selected algorithm and objective and
/// writes `solve.json` or `solve.csv`.
pub fn cmd_solve(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let (_, rows) = single_scenario_rows(cfg)?;
    let files = write_all(vec![rows_file(cfg, SOLVE_STEM, &rows)?])?;
    Ok(CommandOutput { files, rows, summary: Vec::new() })
}

/// Per-position age curves for one scenario, written to `curves.csv`.
pub fn cmd_curves(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let (_, rows) = single_scenario_rows(cfg)?;
    let path = cfg.output.dir.join(CURVES_FILE);
    let files = write_all(vec![(path, curves_csv(&rows)?)])?;
    Ok(CommandOutput { files, rows, summary: Vec::new() })
}

/// Solves `trials` generated scenarios for each network size and writes the
/// rows plus per-size means.
///
/// Trial scenarios reuse the generator's radius and radio settings with
/// `m` from the sweep and seed [`trial_seed`]`(base_seed, trial)`, so a
/// trial's scenarios are nested across sizes. GA runs are seeded with
/// [`ga_trial_seed`]`(ga.seed, scenario seed, m)`.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| BenchError::Config("sweep settings missing (give --sweep-m or a [sweep] table)".into()))?;
    let base = match &cfg.scenario {
        ScenarioSource::Generate(spec) => spec.clone(),
        ScenarioSource::File(_) => {
            return Err(BenchError::Config("sweep generates its own scenarios; drop --scenario".into()))
        }
    };
    let largest = sweep.m_values.iter().copied().max().unwrap_or(0);
    cfg.check_capacity(largest)?;

    let jobs: Vec<(usize, usize)> = sweep
        .m_values
        .iter()
        .flat_map(|&m| (0..sweep.trials).map(move |t| (m, t)))
        .collect();
    let per_job: Vec<Vec<ResultRow>> = jobs
        .par_iter()
        .map(|&(m, trial)| {
            let seed = trial_seed(sweep.base_seed, trial);
            let spec = GeneratorSpec { m, seed, ..base.clone() };
            let loaded = load_scenario(&ScenarioSource::Generate(spec))?;
            let eta = transit_matrix(&loaded.scenario)?;
            let ga = GaParams { seed: ga_trial_seed(cfg.ga.seed, seed, m), ..cfg.ga.clone() };
            let id = format!("m{m}-t{trial}");
            solve_scenario(cfg, &id, Some(trial), Some(seed), &eta, &ga)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ResultRow> = per_job.into_iter().flatten().collect();
    let summary = summarize(&rows);

    let files = write_all(vec![
        rows_file(cfg, SWEEP_STEM, &rows)?,
        (cfg.output.dir.join(SWEEP_SUMMARY_FILE), summary_csv(&summary)?),
    ])?;
    Ok(CommandOutput { files, rows, summary })
}
