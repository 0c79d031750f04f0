//! Result rows and their file encodings.
//!
//! Row CSV columns, in order:
//!
//! `scenario_id, m, trial, seed, algorithm, objective, objective_value,
//! max_age, avg_age, trajectory, ages, weighted_partials, wall_time`
//!
//! List-valued columns hold space-separated values. `trial`, `seed` and
//! `wall_time` are empty when not applicable.
//!
//! Curve CSV columns: `scenario_id, algorithm, objective, position,
//! node_id, timestamp, age, weighted_partial`.
//!
//! Sweep summary CSV columns: `m, algorithm, objective, trials,
//! mean_max_age, mean_avg_age, mean_objective`.

use aoi_core::aoi::evaluate_mission;
use aoi_core::{Algorithm, ObjectiveKind, SolveResult, Trajectory, TransitCostMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Relative tolerance for the write-time replay check.
pub const REPLAY_TOLERANCE: f64 = 1e-9;

pub const ROW_COLUMNS: [&str; 13] = [
    "scenario_id",
    "m",
    "trial",
    "seed",
    "algorithm",
    "objective",
    "objective_value",
    "max_age",
    "avg_age",
    "trajectory",
    "ages",
    "weighted_partials",
    "wall_time",
];

pub const CURVE_COLUMNS: [&str; 8] = [
    "scenario_id",
    "algorithm",
    "objective",
    "position",
    "node_id",
    "timestamp",
    "age",
    "weighted_partial",
];

pub const SUMMARY_COLUMNS: [&str; 7] = [
    "m",
    "algorithm",
    "objective",
    "trials",
    "mean_max_age",
    "mean_avg_age",
    "mean_objective",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario_id: String,
    pub m: usize,
    pub trial: Option<usize>,
    /// Seed the scenario was generated from, if it was generated.
    pub seed: Option<u64>,
    pub algorithm: Algorithm,
    pub objective: ObjectiveKind,
    pub trajectory: Trajectory,
    pub objective_value: f64,
    pub max_age: f64,
    pub avg_age: f64,
    /// `X_i` by position.
    pub ages: Vec<f64>,
    /// `X̄_i` by position.
    pub weighted_partials: Vec<f64>,
    pub timestamps: Vec<f64>,
    pub wall_time: Option<f64>,
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

impl ResultRow {
    /// Builds a row and checks that the trajectory reproduces the solver's
    /// objective value.
    pub fn from_solve(
        scenario_id: &str,
        trial: Option<usize>,
        seed: Option<u64>,
        result: &SolveResult,
        eta: &TransitCostMatrix,
        record_timing: bool,
    ) -> Result<Self> {
        let report = evaluate_mission(&result.trajectory, eta)?;
        let replayed = report.objective(result.objective_kind);
        if relative_gap(replayed, result.objective_value) > REPLAY_TOLERANCE {
            return Err(BenchError::Inconsistent {
                scenario_id: scenario_id.to_string(),
                algorithm: result.algorithm.to_string(),
                objective: result.objective_kind.to_string(),
                stored: result.objective_value,
                replayed,
            });
        }
        Ok(ResultRow {
            scenario_id: scenario_id.to_string(),
            m: eta.m(),
            trial,
            seed,
            algorithm: result.algorithm,
            objective: result.objective_kind,
            trajectory: result.trajectory.clone(),
            objective_value: result.objective_value,
            max_age: report.max_age,
            avg_age: report.avg_age,
            ages: report.ages,
            weighted_partials: report.weighted_partials,
            timestamps: report.timestamps,
            wall_time: record_timing.then_some(result.wall_time.as_secs_f64()),
        })
    }

    fn csv_record(&self) -> Vec<String> {
        vec![
            self.scenario_id.clone(),
            self.m.to_string(),
            opt(self.trial),
            opt(self.seed),
            self.algorithm.to_string(),
            self.objective.to_string(),
            self.objective_value.to_string(),
            self.max_age.to_string(),
            self.avg_age.to_string(),
            join(self.trajectory.order()),
            join(&self.ages),
            join(&self.weighted_partials),
            opt(self.wall_time),
        ]
    }

    /// One curve point per visit position.
    pub fn curve_records(&self) -> Vec<Vec<String>> {
        (0..self.m)
            .map(|k| {
                vec![
                    self.scenario_id.clone(),
                    self.algorithm.to_string(),
                    self.objective.to_string(),
                    (k + 1).to_string(),
                    self.trajectory.order()[k].to_string(),
                    self.timestamps[k + 1].to_string(),
                    self.ages[k].to_string(),
                    self.weighted_partials[k].to_string(),
                ]
            })
            .collect()
    }
}

fn opt<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn to_csv(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for record in records {
        writer.write_record(&record)?;
    }
    writer.into_inner().map_err(|e| BenchError::Csv(e.into_error().into()))
}

pub fn rows_csv(rows: &[ResultRow]) -> Result<Vec<u8>> {
    to_csv(&ROW_COLUMNS, rows.iter().map(ResultRow::csv_record))
}

pub fn rows_json(rows: &[ResultRow]) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(rows)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn curves_csv(rows: &[ResultRow]) -> Result<Vec<u8>> {
    to_csv(&CURVE_COLUMNS, rows.iter().flat_map(ResultRow::curve_records))
}

/// Per-`(m, algorithm, objective)` means over trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub m: usize,
    pub algorithm: Algorithm,
    pub objective: ObjectiveKind,
    pub trials: usize,
    pub mean_max_age: f64,
    pub mean_avg_age: f64,
    pub mean_objective: f64,
}

/// Groups rows by `(m, algorithm, objective)`, in first-seen order.
pub fn summarize(rows: &[ResultRow]) -> Vec<SweepSummary> {
    let mut groups: Vec<(usize, Algorithm, ObjectiveKind, Vec<&ResultRow>)> = Vec::new();
    for row in rows {
        match groups
            .iter_mut()
            .find(|(m, a, o, _)| (*m, *a, *o) == (row.m, row.algorithm, row.objective))
        {
            Some(group) => group.3.push(row),
            None => groups.push((row.m, row.algorithm, row.objective, vec![row])),
        }
    }
    groups
        .into_iter()
        .map(|(m, algorithm, objective, members)| {
            let n = members.len() as f64;
            let mean = |f: fn(&ResultRow) -> f64| members.iter().map(|r| f(r)).sum::<f64>() / n;
            SweepSummary {
                m,
                algorithm,
                objective,
                trials: members.len(),
                mean_max_age: mean(|r| r.max_age),
                mean_avg_age: mean(|r| r.avg_age),
                mean_objective: mean(|r| r.objective_value),
            }
        })
        .collect()
}

pub fn summary_csv(summary: &[SweepSummary]) -> Result<Vec<u8>> {
    to_csv(
        &SUMMARY_COLUMNS,
        summary.iter().map(|s| {
            vec![
                s.m.to_string(),
                s.algorithm.to_string(),
                s.objective.to_string(),
                s.trials.to_string(),
                s.mean_max_age.to_string(),
                s.mean_avg_age.to_string(),
                s.mean_objective.to_string(),
            ]
        }),
    )
}
