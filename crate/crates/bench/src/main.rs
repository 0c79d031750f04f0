use std::path::PathBuf;
use std::process::ExitCode;

use aoi_bench::commands::CommandOutput;
use aoi_bench::{cmd_curves, cmd_gen, cmd_solve, cmd_sweep, BenchError, ExperimentConfig, GeneratorSpec, OutputFormat, ScenarioSource};
use aoi_core::{Algorithm, ObjectiveKind};
use clap::{Args, Parser, Subcommand};

/// Plan age-of-information-optimal data-collection tours.
#[derive(Parser, Debug)]
#[command(name = "aoi-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random scenario file.
    Gen {
        #[command(flatten)]
        scenario: GenArgs,
        /// Scenario file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one scenario with each selected algorithm and objective.
    Solve(RunArgs),
    /// Solve generated scenarios over a range of network sizes.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Network sizes to sweep (repeatable).
        #[arg(long = "sweep-m", value_name = "M")]
        sweep_m: Vec<usize>,
        /// Scenarios per network size.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        base_seed: Option<u64>,
    },
    /// Emit per-position age curves for one scenario.
    Curves(RunArgs),
}

#[derive(Args, Debug, Default)]
struct GenArgs {
    /// Number of sensor nodes.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Disk radius in meters.
    #[arg(long)]
    radius: Option<f64>,
    /// Packet length per node in bits.
    #[arg(long)]
    packet_bits: Option<f64>,
    /// Transmit power per node in watts.
    #[arg(long)]
    tx_power: Option<f64>,
    #[arg(long)]
    bandwidth_hz: Option<f64>,
    /// Channel gain at 1 m, in dB.
    #[arg(long, allow_hyphen_values = true)]
    ref_gain_db: Option<f64>,
    /// Flight altitude in meters.
    #[arg(long)]
    altitude: Option<f64>,
    /// Receiver noise power in dBm.
    #[arg(long, allow_hyphen_values = true)]
    noise_dbm: Option<f64>,
    /// Flight speed in m/s.
    #[arg(long)]
    speed: Option<f64>,
}

impl GenArgs {
    fn is_empty(&self) -> bool {
        self.m.is_none()
            && self.seed.is_none()
            && self.radius.is_none()
            && self.packet_bits.is_none()
            && self.tx_power.is_none()
            && self.bandwidth_hz.is_none()
            && self.ref_gain_db.is_none()
            && self.altitude.is_none()
            && self.noise_dbm.is_none()
            && self.speed.is_none()
    }

    fn apply(&self, spec: &mut GeneratorSpec) {
        macro_rules! set {
            ($src:expr => $dst:expr) => {
                if let Some(v) = $src {
                    $dst = v;
                }
            };
        }
        set!(self.m => spec.m);
        set!(self.seed => spec.seed);
        set!(self.radius => spec.radius_m);
        set!(self.packet_bits => spec.packet_bits);
        set!(self.tx_power => spec.tx_power_w);
        set!(self.bandwidth_hz => spec.radio.bandwidth_hz);
        set!(self.ref_gain_db => spec.radio.ref_gain_db);
        set!(self.altitude => spec.radio.altitude_m);
        set!(self.noise_dbm => spec.radio.noise_power_dbm);
        set!(self.speed => spec.radio.speed_mps);
    }
}

#[derive(Args, Debug, Default)]
struct GaArgs {
    #[arg(long)]
    ga_population_size: Option<usize>,
    #[arg(long)]
    ga_generations: Option<usize>,
    #[arg(long)]
    ga_acceleration: Option<f64>,
    #[arg(long)]
    ga_selection_threshold: Option<f64>,
    #[arg(long)]
    ga_mutation_prob: Option<f64>,
    #[arg(long)]
    ga_epsilon: Option<f64>,
    #[arg(long)]
    ga_mutation_swaps: Option<usize>,
    #[arg(long)]
    ga_elitism: Option<usize>,
    #[arg(long)]
    ga_seed: Option<u64>,
    #[arg(long)]
    ga_seed_with_greedy: Option<bool>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML experiment configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario file to solve instead of generating one.
    #[arg(long, conflicts_with = "m")]
    scenario: Option<PathBuf>,
    #[command(flatten)]
    generate: GenArgs,
    /// Algorithm to run: dp, ga, greedy or brute (repeatable).
    #[arg(long = "algo", value_parser = parse_algorithm)]
    algorithms: Vec<Algorithm>,
    /// Objective: max-aoi or ave-aoi (repeatable).
    #[arg(long = "objective", value_parser = parse_objective)]
    objectives: Vec<ObjectiveKind>,
    #[command(flatten)]
    ga: GaArgs,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Row file format.
    #[arg(long, value_parser = ["json", "csv"])]
    format: Option<String>,
    /// Record solver wall time in output files.
    #[arg(long)]
    timing: bool,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: aoi_core::AoiError| e.to_string())
}

fn parse_objective(s: &str) -> Result<ObjectiveKind, String> {
    s.parse().map_err(|e: aoi_core::AoiError| e.to_string())
}

impl RunArgs {
    fn into_config(self) -> Result<ExperimentConfig, BenchError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(path) = self.scenario {
            cfg.scenario = ScenarioSource::File(path);
        } else if !self.generate.is_empty() {
            let mut spec = match &cfg.scenario {
                ScenarioSource::Generate(spec) => spec.clone(),
                ScenarioSource::File(_) => GeneratorSpec::default(),
            };
            self.generate.apply(&mut spec);
            cfg.scenario = ScenarioSource::Generate(spec);
        }
        if !self.algorithms.is_empty() {
            cfg.algorithms = self.algorithms;
        }
        if !self.objectives.is_empty() {
            cfg.objectives = self.objectives;
        }

        let ga = &mut cfg.ga;
        let g = self.ga;
        macro_rules! set {
            ($($src:ident => $dst:ident),*) => {
                $(if let Some(v) = g.$src { ga.$dst = v; })*
            };
        }
        set!(
            ga_population_size => population_size,
            ga_generations => generations,
            ga_acceleration => acceleration,
            ga_selection_threshold => selection_threshold,
            ga_mutation_prob => mutation_prob,
            ga_epsilon => epsilon,
            ga_mutation_swaps => mutation_swaps,
            ga_elitism => elitism,
            ga_seed => seed,
            ga_seed_with_greedy => seed_with_greedy
        );

        if let Some(dir) = self.out {
            cfg.output.dir = dir;
        }
        match self.format.as_deref() {
            Some("csv") => cfg.output.format = OutputFormat::Csv,
            Some("json") => cfg.output.format = OutputFormat::Json,
            _ => {}
        }
        cfg.output.timing |= self.timing;
        Ok(cfg)
    }
}

fn print_rows(output: &CommandOutput) {
    for row in &output.rows {
        let timing = row.wall_time.map(|t| format!("  {t:.3}s")).unwrap_or_default();
        println!(
            "{:<8} {:<7} {:<7} {:>14.6}  {}{}",
            row.scenario_id, row.algorithm, row.objective, row.objective_value, row.trajectory, timing
        );
    }
}

fn print_files(output: &CommandOutput) {
    for file in &output.files {
        println!("wrote {}", file.display());
    }
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Gen { scenario, out } => {
            let mut spec = GeneratorSpec::default();
            scenario.apply(&mut spec);
            let doc = cmd_gen(&spec, &out)?;
            println!(
                "M = {}, radius = {} m, seed = {} -> {}",
                doc.nodes.len(),
                spec.radius_m,
                spec.seed,
                out.display()
            );
        }
        Command::Solve(args) => {
            let output = cmd_solve(&args.into_config()?)?;
            print_rows(&output);
            print_files(&output);
        }
        Command::Curves(args) => {
            let output = cmd_curves(&args.into_config()?)?;
            print_rows(&output);
            print_files(&output);
        }
        Command::Sweep { run, sweep_m, trials, base_seed } => {
            let mut cfg = run.into_config()?;
            if !sweep_m.is_empty() || trials.is_some() || base_seed.is_some() || cfg.sweep.is_none() {
                let mut sweep = cfg.sweep.take().unwrap_or_default();
                if !sweep_m.is_empty() {
                    sweep.m_values = sweep_m;
                }
                if let Some(t) = trials {
                    sweep.trials = t;
                }
                if let Some(s) = base_seed {
                    sweep.base_seed = s;
                }
                cfg.sweep = Some(sweep);
            }
            let output = cmd_sweep(&cfg)?;
            for s in &output.summary {
                println!(
                    "M = {:<3} {:<7} {:<7} mean X1 = {:>12.6}  mean avg = {:>12.6}  ({} trials)",
                    s.m, s.algorithm, s.objective, s.mean_max_age, s.mean_avg_age, s.trials
                );
            }
            print_files(&output);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
