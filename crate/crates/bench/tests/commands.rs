use std::fs;

use aoi_bench::commands::{CURVES_FILE, SOLVE_STEM, SWEEP_SUMMARY_FILE};
use aoi_bench::{cmd_curves, cmd_gen, cmd_solve, cmd_sweep, BenchError, ExperimentConfig, GeneratorSpec, OutputFormat, ResultRow, ScenarioSource, SweepSpec};
use aoi_core::{objective_value, transit_matrix, Algorithm, GaParams, ObjectiveKind, ScenarioDocument};
use tempfile::TempDir;

fn small_ga() -> GaParams {
    GaParams { population_size: 200, generations: 200, ..GaParams::default() }
}

fn config(dir: &TempDir, m: usize, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        scenario: ScenarioSource::Generate(GeneratorSpec { m, seed, ..Default::default() }),
        ga: small_ga(),
        ..Default::default()
    };
    cfg.output.dir = dir.path().join("out");
    cfg
}

fn row(rows: &[ResultRow], algo: Algorithm, kind: ObjectiveKind) -> &ResultRow {
    rows.iter().find(|r| r.algorithm == algo && r.objective == kind).unwrap()
}

#[test]
fn gen_writes_loadable_document() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("s.json");
    let doc = cmd_gen(&GeneratorSpec { m: 8, seed: 5, ..Default::default() }, &path).unwrap();
    let loaded = ScenarioDocument::load(&path).unwrap();
    assert_eq!(loaded, doc);
    assert_eq!(loaded.nodes.len(), 8);
    assert_eq!(fs::read_to_string(&path).unwrap(), loaded.to_json());
    for n in &loaded.nodes {
        assert!((n.x * n.x + n.y * n.y).sqrt() <= 1000.0);
        assert_eq!(n.tx_power_w, 0.1);
        assert_eq!(n.packet_bits, 1e6);
    }
}

#[test]
fn gen_rejects_empty_network() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("s.json");
    assert!(cmd_gen(&GeneratorSpec { m: 0, ..Default::default() }, &path).is_err());
    assert!(!path.exists());
}

#[test]
fn solve_from_file_uses_file_stem_as_id() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("field.json");
    cmd_gen(&GeneratorSpec { m: 6, seed: 1, ..Default::default() }, &path).unwrap();
    let mut cfg = config(&dir, 6, 1);
    cfg.scenario = ScenarioSource::File(path);
    cfg.output.format = OutputFormat::Csv;
    let out = cmd_solve(&cfg).unwrap();
    assert_eq!(out.rows.len(), 6);
    assert!(out.rows.iter().all(|r| r.scenario_id == "field" && r.seed.is_none()));
    assert_eq!(out.files, vec![cfg.output.dir.join(format!("{SOLVE_STEM}.csv"))]);
}

#[test]
fn solve_dp_is_minimal_and_greedy_ignores_objective() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, 14, 2);
    let out = cmd_solve(&cfg).unwrap();
    for kind in ObjectiveKind::ALL {
        let dp = row(&out.rows, Algorithm::Dp, kind).objective_value;
        for algo in [Algorithm::Ga, Algorithm::Greedy] {
            assert!(row(&out.rows, algo, kind).objective_value >= dp * (1.0 - 1e-12));
        }
    }
    assert_eq!(
        row(&out.rows, Algorithm::Greedy, ObjectiveKind::MaxAoi).trajectory,
        row(&out.rows, Algorithm::Greedy, ObjectiveKind::AveAoi).trajectory
    );
    let written: Vec<ResultRow> = serde_json::from_slice(&fs::read(&out.files[0]).unwrap()).unwrap();
    assert_eq!(written, out.rows);
}

#[test]
fn solve_over_capacity_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let mut cfg = config(&dir, 30, 0);
    cfg.algorithms = vec![Algorithm::Dp];
    let err = cmd_solve(&cfg).unwrap_err();
    assert!(matches!(err, BenchError::Config(ref msg) if msg.contains("24")), "{err}");
    assert!(!cfg.output.dir.exists());
}

#[test]
fn invalid_ga_params_fail_before_solving() {
    let dir = TempDir::new().unwrap();
    let mut cfg = config(&dir, 5, 0);
    cfg.ga.population_size = 1;
    assert!(cmd_solve(&cfg).is_err());
    assert!(!cfg.output.dir.exists());
}

#[test]
fn rows_replay_against_their_scenarios() {
    let dir = TempDir::new().unwrap();
    let mut cfg = config(&dir, 0, 0);
    cfg.sweep = Some(SweepSpec { m_values: vec![3, 6], trials: 3, base_seed: 11 });
    let out = cmd_sweep(&cfg).unwrap();
    for r in &out.rows {
        let spec = GeneratorSpec { m: r.m, seed: r.seed.unwrap(), ..Default::default() };
        let scenario = aoi_bench::commands::generate(&spec).unwrap().to_scenario().unwrap();
        let eta = transit_matrix(&scenario).unwrap();
        let replay = objective_value(&r.trajectory, &eta, r.objective).unwrap();
        assert!(
            aoi_bench::rows::relative_gap(replay, r.objective_value) <= 1e-12,
            "{}: {replay} vs {}",
            r.scenario_id,
            r.objective_value
        );
    }
}

#[test]
fn sweep_mean_oldest_age_grows_with_m() {
    let dir = TempDir::new().unwrap();
    let mut cfg = config(&dir, 0, 0);
    cfg.algorithms = vec![Algorithm::Dp, Algorithm::Ga];
    cfg.sweep = Some(SweepSpec::default());
    let out = cmd_sweep(&cfg).unwrap();
    assert_eq!(out.rows.len(), 5 * 10 * 2 * 2);

    let dp_max: Vec<f64> = out
        .summary
        .iter()
        .filter(|s| s.algorithm == Algorithm::Dp && s.objective == ObjectiveKind::MaxAoi)
        .map(|s| s.mean_max_age)
        .collect();
    assert_eq!(dp_max.len(), 5);
    assert!(dp_max.windows(2).all(|w| w[0] < w[1]), "{dp_max:?}");

    for s in out.summary.iter().filter(|s| s.algorithm == Algorithm::Ga) {
        let dp = out
            .summary
            .iter()
            .find(|d| d.algorithm == Algorithm::Dp && d.m == s.m && d.objective == s.objective)
            .unwrap();
        assert!(s.mean_objective <= dp.mean_objective * 1.05);
    }
    assert!(cfg.output.dir.join(SWEEP_SUMMARY_FILE).exists());
}

#[test]
fn sweep_scenarios_nest_across_sizes() {
    let dir = TempDir::new().unwrap();
    let mut cfg = config(&dir, 0, 0);
    cfg.algorithms = vec![Algorithm::Dp];
    cfg.objectives = vec![ObjectiveKind::MaxAoi];
    cfg.sweep = Some(SweepSpec { m_values: (3..=8).collect(), trials: 4, base_seed: 5 });
    let out = cmd_sweep(&cfg).unwrap();
    for trial in 0..4 {
        let per_m: Vec<&ResultRow> = out.rows.iter().filter(|r| r.trial == Some(trial)).collect();
        assert!(per_m.windows(2).all(|w| w[0].seed == w[1].seed));
        // Optimal oldest age never drops when a node is added.
        assert!(per_m.windows(2).all(|w| w[0].max_age <= w[1].max_age));
        let small = aoi_bench::commands::generate(&GeneratorSpec { m: 3, seed: per_m[0].seed.unwrap(), ..Default::default() }).unwrap();
        let large = aoi_bench::commands::generate(&GeneratorSpec { m: 8, seed: per_m[0].seed.unwrap(), ..Default::default() }).unwrap();
        assert_eq!(small.data_center, large.data_center);
        assert_eq!(small.nodes[..], large.nodes[..3]);
    }
}

#[test]
fn sweep_rejects_file_source() {
    let dir = TempDir::new().unwrap();
    let mut cfg = config(&dir, 5, 0);
    cfg.scenario = ScenarioSource::File(dir.path().join("x.json"));
    cfg.sweep = Some(SweepSpec::default());
    assert!(cmd_sweep(&cfg).is_err());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let mut cfg = config(&dir, 0, 0);
    cfg.output.format = OutputFormat::Csv;
    cfg.sweep = Some(SweepSpec { m_values: vec![4, 7], trials: 2, base_seed: 3 });
    let first = cmd_sweep(&cfg).unwrap();
    let bytes: Vec<Vec<u8>> = first.files.iter().map(|f| fs::read(f).unwrap()).collect();
    let second = cmd_sweep(&cfg).unwrap();
    let again: Vec<Vec<u8>> = second.files.iter().map(|f| fs::read(f).unwrap()).collect();
    assert_eq!(bytes, again);
}

#[test]
fn curves_decrease_along_the_tour() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, 14, 9);
    let out = cmd_curves(&cfg).unwrap();
    for r in &out.rows {
        assert!(r.ages.windows(2).all(|w| w[0] > w[1]));
        assert!(r.weighted_partials.windows(2).all(|w| w[0] > w[1]));
    }
    for kind in ObjectiveKind::ALL {
        let dp = row(&out.rows, Algorithm::Dp, kind);
        for r in out.rows.iter().filter(|r| r.objective == kind) {
            let first = match kind {
                ObjectiveKind::MaxAoi => (dp.ages[0], r.ages[0]),
                ObjectiveKind::AveAoi => (dp.weighted_partials[0], r.weighted_partials[0]),
            };
            assert!(first.0 <= first.1 * (1.0 + 1e-12));
        }
    }
    let text = fs::read_to_string(cfg.output.dir.join(CURVES_FILE)).unwrap();
    assert_eq!(text.lines().count(), 1 + 14 * out.rows.len());
}

#[test]
fn curves_single_node() {
    let dir = TempDir::new().unwrap();
    let mut cfg = config(&dir, 1, 0);
    cfg.algorithms = vec![Algorithm::Dp];
    cfg.objectives = vec![ObjectiveKind::MaxAoi];
    cmd_curves(&cfg).unwrap();
    let text = fs::read_to_string(cfg.output.dir.join(CURVES_FILE)).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("m1-seed0,dp,max-aoi,1,1,"));
}

#[test]
fn cli_flags_and_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_aoi-bench");
    let dir = TempDir::new().unwrap();
    let scenario = dir.path().join("s.json");
    let status = std::process::Command::new(bin)
        .args(["gen", "--m", "4", "--seed", "2", "--noise-dbm", "-100", "--out"])
        .arg(&scenario)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(ScenarioDocument::load(&scenario).unwrap().radio.noise_power_dbm, -100.0);

    let out = dir.path().join("o");
    let status = std::process::Command::new(bin)
        .args(["solve", "--algo", "dp", "--algo", "brute", "--objective", "ave-aoi", "--format", "csv", "--scenario"])
        .arg(&scenario)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("solve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let bad = std::process::Command::new(bin)
        .args(["solve", "--m", "12", "--algo", "brute", "--out"])
        .arg(dir.path().join("bad"))
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("brute"));
    assert!(!dir.path().join("bad").exists());
}
