//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on I/O failures, 2 on invalid arguments or
//! input documents.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::distributions::{BetaParams, DEFAULT_GRID_SIZE};
use crate::error::Error;
use crate::experiment::{emit_density, parse_experiment, run_analysis, ExperimentSpec};
use crate::models::Metric;
use crate::rng::RngStream;
use crate::simulation::simulate_updating_with_grid;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bayes-ab", version, about = "Bayesian A/B test analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decision table for an experiment file.
    Analyze(AnalyzeArgs),
    /// Simulated Bayesian updating on a Bernoulli stream.
    SimulateUpdating(SimulateArgs),
    /// Posterior density grids for plotting.
    Density(DensityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ExperimentOverrides {
    /// Experiment JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Write here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// conversion, value (alias revenue) or gain.
    #[arg(long)]
    pub metric: Option<Metric>,
    #[arg(long)]
    pub baseline: Option<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: ExperimentOverrides,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub common: ExperimentOverrides,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Grid points (analytic) or histogram bins.
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    pub bins: usize,
    /// Restrict output to these variants; repeatable.
    #[arg(long = "variant")]
    pub variants: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub true_rate: f64,
    #[arg(long)]
    pub n: u64,
    /// Beta prior as `a,b`.
    #[arg(long, value_parser = parse_prior, default_value = "1,1")]
    pub prior: BetaParams,
    /// Comma-separated prefix lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    pub checkpoints: Vec<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    pub bins: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_prior(s: &str) -> Result<BetaParams, String> {
    let (a, b) = s.split_once(',').ok_or("expected `a,b`")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("prior a: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("prior b: {e}"))?;
    BetaParams::new(a, b).map_err(|e| e.to_string())
}

enum Failure {
    Io(String),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => analyze(&args, out, err),
        Command::SimulateUpdating(args) => simulate(&args, out, err),
        Command::Density(args) => density(&args, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_IO
        }
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID
        }
    }
}

fn load(common: &ExperimentOverrides, err: &mut dyn Write) -> Result<ExperimentSpec, Failure> {
    let bytes = std::fs::read(&common.input)
        .map_err(|e| Failure::Io(format!("reading {}: {e}", common.input.display())))?;
    let mut spec = parse_experiment(&bytes)?;
    if let Some(samples) = common.samples {
        spec.samples = samples;
    }
    if let Some(metric) = common.metric {
        spec.metric = metric;
    }
    if let Some(baseline) = &common.baseline {
        spec.baseline = baseline.clone();
    }
    spec.seed = common.seed.or(spec.seed);
    if spec.seed.is_none() {
        let seed = RngStream::from_entropy().seed();
        let _ = writeln!(err, "seed: {seed}");
        spec.seed = Some(seed);
    }
    spec.validate()?;
    Ok(spec)
}

fn emit(output: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Io(format!("writing {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("writing output: {e}"))),
    }
}

fn unsupported(command: &str, format: Format) -> Failure {
    let name = format.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
    Failure::Invalid(format!("--format {name} is not supported by `{command}`"))
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    if args.format == Format::Csv {
        return Err(unsupported("analyze", args.format));
    }
    let spec = load(&args.common, err)?;
    let analysis = run_analysis(&spec)?;
    let text = match args.format {
        Format::Json => analysis.report.to_json() + "\n",
        _ => analysis.report.to_table(),
    };
    emit(&args.common.output, &text, out)
}

fn density(args: &DensityArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    if args.format == Format::Table {
        return Err(unsupported("density", args.format));
    }
    let spec = load(&args.common, err)?;
    let report = emit_density(&spec, args.bins, &args.variants)?;
    let text = match args.format {
        Format::Json => report.to_json() + "\n",
        _ => report.to_csv(),
    };
    emit(&args.common.output, &text, out)
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    if args.format == Format::Table {
        return Err(unsupported("simulate-updating", args.format));
    }
    let mut rng = match args.seed {
        Some(seed) => RngStream::new(seed),
        None => {
            let rng = RngStream::from_entropy();
            let _ = writeln!(err, "seed: {}", rng.seed());
            rng
        }
    };
    let trace =
        simulate_updating_with_grid(&args.prior, args.true_rate, args.n, &args.checkpoints, args.bins, &mut rng)?;
    let text = match args.format {
        Format::Csv => trace.summary_csv(),
        _ => trace.to_json() + "\n",
    };
    emit(&args.output, &text, out)
}
