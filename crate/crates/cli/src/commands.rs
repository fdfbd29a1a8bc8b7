use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use emubench_core::metrics::{rollout_metrics_batch, MetricDescriptor, RolloutReport, DEFAULT_HORIZON};
use emubench_core::scenarios::{registry_list, NonlinearCoefficients, NonlinearKind, ScenarioSpec, Split};
use emubench_core::train::{run_stencil_experiment, ExperimentReport, Methodology, StencilExperimentConfig};
use emubench_core::Trajectory;
use serde::Serialize;

use crate::config::{ExportFormat, Overrides, RunConfig};
use crate::error::{CliError, EXIT_OK};
use crate::export::{export_split, load_raw64, ExportBundle, Sidecar};

#[derive(Debug, Parser)]
#[command(name = "emubench", version, about = "Reference trajectories, stencil experiments and rollout metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print every (dynamic, dimension) scenario of the registry.
    List(ListArgs),
    /// Simulate the train and test splits of a scenario and export them.
    Generate(GenerateArgs),
    /// Train linear stencils on advection and evaluate their rollouts.
    Experiment(ExperimentArgs),
    /// Compare predicted against reference trajectories.
    Metrics(MetricsArgs),
}

#[derive(Debug, Args)]
pub struct ListArgs {
    /// Emit JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Default, Args)]
pub struct OverrideArgs {
    #[arg(long)]
    pub num_points: Option<usize>,
    /// ETDRK order 0..=4.
    #[arg(long)]
    pub order: Option<u8>,
    #[arg(long)]
    pub substeps: Option<usize>,
    #[arg(long)]
    pub warmup: Option<usize>,
    #[arg(long)]
    pub dealias_fraction: Option<f64>,
    /// Highest wavenumber of Fourier initial conditions.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Gray-Scott pattern type (alpha, beta, ..., theta, iota, kappa).
    #[arg(long = "type")]
    pub pattern_type: Option<String>,
    /// Comma-separated difficulty gammas starting at order 0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gammas: Option<Vec<f64>>,
    /// Difficulty delta as KIND=VALUE with KIND in conv, conv_sc, gn, quad. Repeatable.
    #[arg(long = "delta", value_parser = parse_delta, allow_hyphen_values = true)]
    pub deltas: Vec<(NonlinearKind, f64)>,
    /// Time step of physical scenarios.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub train_samples: Option<usize>,
    #[arg(long)]
    pub train_steps: Option<usize>,
    #[arg(long)]
    pub test_samples: Option<usize>,
    #[arg(long)]
    pub test_steps: Option<usize>,
}

fn parse_delta(s: &str) -> Result<(NonlinearKind, f64), String> {
    let (kind, value) = s.split_once('=').ok_or("expected KIND=VALUE")?;
    let kind = NonlinearKind::ALL
        .into_iter()
        .find(|k| k.name() == kind)
        .ok_or_else(|| format!("unknown nonlinear component {kind:?}"))?;
    let value = value.parse::<f64>().map_err(|e| e.to_string())?;
    Ok((kind, value))
}

impl OverrideArgs {
    fn into_overrides(self) -> Overrides {
        let deltas = (!self.deltas.is_empty()).then(|| {
            let mut d = NonlinearCoefficients::default();
            for (kind, value) in &self.deltas {
                *d.get_mut(*kind) = *value;
            }
            d
        });
        Overrides {
            num_points: self.num_points,
            order: self.order,
            substeps: self.substeps,
            warmup: self.warmup,
            dealias_fraction: self.dealias_fraction,
            cutoff: self.cutoff,
            pattern_type: self.pattern_type,
            gammas: self.gammas,
            deltas,
            dt: self.dt,
            train_samples: self.train_samples,
            train_steps: self.train_steps,
            test_samples: self.test_samples,
            test_steps: self.test_steps,
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct GenerateArgs {
    /// Scenario id `[diff_|norm_|phy_]name`.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub dims: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<ExportFormat>,
    /// Only export this split.
    #[arg(long, value_parser = parse_split)]
    pub split: Option<Split>,
    /// TOML file with the same settings as the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Regenerate exactly the dataset described by an existing sidecar.
    #[arg(long, conflicts_with_all = ["scenario", "config"])]
    pub from_sidecar: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub overrides: OverrideArgs,
}

fn parse_split(s: &str) -> Result<Split, String> {
    Split::from_name(s).map_err(|e| e.to_string())
}

#[derive(Debug, Default, Args)]
pub struct ExperimentArgs {
    /// TOML file whose `[experiment]` table configures the run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated methodologies: one, sup;T, div;T.
    #[arg(long, value_delimiter = ',')]
    pub methodologies: Option<Vec<String>>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Default, Args)]
pub struct MetricsArgs {
    /// Predicted trajectories (raw64 payload or its sidecar).
    #[arg(long)]
    pub pred: PathBuf,
    /// Reference trajectories (raw64 payload or its sidecar).
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Metric name, e.g. mean_nRMSE or mean_fourier_MSE. Repeatable.
    #[arg(long = "metric")]
    pub metrics: Vec<String>,
    /// Number of steps in the geometric-mean aggregate.
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    pub horizon: usize,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::List(args) => list(&args),
        Command::Generate(args) => {
            let bundles = generate(args)?;
            for b in &bundles {
                println!("{}  {:?}  sha256 {}", b.payload.display(), b.shape, b.sha256);
            }
            Ok(())
        }
        Command::Experiment(args) => {
            let report = experiment(args)?;
            print_experiment(&report);
            Ok(())
        }
        Command::Metrics(args) => {
            let report = metrics(&args)?;
            for r in &report.reports {
                let first = r.losses.first().copied().unwrap_or(f64::NAN);
                let flag = if r.degenerate { " (degenerate)" } else { "" };
                println!("{:<22} step1 {first:.6e}  gmean@{} {:.6e}{flag}", r.metric, r.horizon, r.aggregate);
            }
            Ok(())
        }
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::failure(e.to_string()))?;
            Ok(pool.install(f))
        }
        _ => Ok(f()),
    }
}

pub fn list(args: &ListArgs) -> Result<(), CliError> {
    let rows = registry_list();
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows).map_err(|e| CliError::failure(e.to_string()))?);
        return Ok(());
    }
    println!("{:<12} {:>4} {:<14} {:<22} {:>2}  title", "dynamic", "dims", "class", "modes", "C");
    for r in &rows {
        let modes: Vec<String> = r.modes.iter().map(|m| m.to_string()).collect();
        println!(
            "{:<12} {:>4} {:<14} {:<22} {:>2}  {}",
            r.name,
            r.num_dims,
            r.class,
            modes.join(","),
            r.channels,
            r.title
        );
    }
    println!("{} scenarios", rows.len());
    Ok(())
}

/// Resolves the effective configuration of a `generate` invocation.
pub fn generate_plan(args: GenerateArgs) -> Result<(ScenarioSpec, u64, ExportFormat, PathBuf, Vec<Split>, Option<usize>), CliError> {
    let splits = args.split.map_or_else(|| vec![Split::Train, Split::Test], |s| vec![s]);
    if let Some(path) = &args.from_sidecar {
        let meta = Sidecar::load(path)?;
        meta.spec.validate()?;
        let out = args.out.unwrap_or_else(|| PathBuf::from("."));
        let format = args.format.unwrap_or(meta.format);
        return Ok((meta.spec, args.seed.unwrap_or(meta.seed), format, out, splits, args.threads));
    }
    let file = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let flags = RunConfig {
        scenario: args.scenario,
        dims: args.dims,
        seed: args.seed,
        out: args.out,
        format: args.format,
        threads: args.threads,
        overrides: args.overrides.into_overrides(),
        experiment: None,
    };
    let cfg = flags.or(file);
    let spec = cfg.scenario_spec()?;
    Ok((
        spec,
        cfg.seed.unwrap_or(0),
        cfg.format.unwrap_or_default(),
        cfg.out.unwrap_or_else(|| PathBuf::from(".")),
        splits,
        cfg.threads,
    ))
}

pub fn generate(args: GenerateArgs) -> Result<Vec<ExportBundle>, CliError> {
    let (spec, seed, format, out, splits, threads) = generate_plan(args)?;
    with_threads(threads, || {
        splits
            .iter()
            .map(|&split| export_split(&spec, split, seed, format, &out))
            .collect::<Result<Vec<_>, _>>()
    })?
}

pub fn experiment_config(args: &ExperimentArgs) -> Result<StencilExperimentConfig, CliError> {
    let mut config = match &args.config {
        Some(p) => RunConfig::load(p)?.experiment.unwrap_or_default(),
        None => StencilExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(ms) = &args.methodologies {
        config.methodologies = ms
            .iter()
            .map(|m| m.parse::<Methodology>().map_err(CliError::from))
            .collect::<Result<_, _>>()?;
    }
    Ok(config)
}

pub fn experiment(args: ExperimentArgs) -> Result<ExperimentReport, CliError> {
    let config = experiment_config(&args)?;
    let report = with_threads(args.threads, || run_stencil_experiment(&config))??;
    if let Some(path) = &args.out {
        write_json(path, &report)?;
    }
    Ok(report)
}

fn print_experiment(report: &ExperimentReport) {
    println!("{:<8} {:>9} {:>9} {:>10} {:>12} {:>12}  status", "label", "theta_c", "theta_r", "dist_FOU", "metric@1", "metric@10");
    for row in &report.rows {
        let (c, r) = row.theta.map_or((f64::NAN, f64::NAN), |t| (t[0], t[1]));
        let loss = |t: usize| row.rollouts.first().and_then(|r| r.losses.get(t)).copied().unwrap_or(f64::NAN);
        println!(
            "{:<8} {c:>9.4} {r:>9.4} {:>10.4} {:>12.4e} {:>12.4e}  {}",
            row.label,
            row.distance_to_fou.unwrap_or(f64::NAN),
            loss(0),
            loss(9),
            row.status
        );
    }
}

#[derive(Debug, Serialize)]
pub struct MetricsReport {
    pub pred: PathBuf,
    pub reference: PathBuf,
    pub reports: Vec<RolloutReport>,
}

pub fn metrics(args: &MetricsArgs) -> Result<MetricsReport, CliError> {
    let names = if args.metrics.is_empty() {
        vec!["mean_nRMSE".to_string()]
    } else {
        args.metrics.clone()
    };
    let descriptors = names
        .iter()
        .map(|n| MetricDescriptor::from_name(n).map_err(|e| CliError::usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let pred = load_raw64(&args.pred)?;
    let reference = load_raw64(&args.reference)?;
    if pred.shape() != reference.shape() || pred.grid() != reference.grid() {
        return Err(CliError::usage(format!(
            "prediction shape {:?} does not match reference shape {:?}",
            pred.shape(),
            reference.shape()
        )));
    }
    let trajectories =
        |set: &emubench_core::scenarios::TrajectorySet| -> Vec<Trajectory> { (0..set.num_samples()).map(|s| set.trajectory(s)).collect() };
    let (p, r) = (trajectories(&pred), trajectories(&reference));
    let reports = descriptors
        .iter()
        .map(|d| rollout_metrics_batch(&p, &r, d, args.horizon).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let report = MetricsReport {
        pred: args.pred.clone(),
        reference: args.reference.clone(),
        reports,
    };
    if let Some(path) = &args.out {
        write_json(path, &report)?;
    }
    Ok(report)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::failure(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}
