use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evendeg::Error;

mod commands;

/// Even-degeneracy of random graphs: generators, deciders, removal procedures,
/// parity statistics and experiment sweeps.
#[derive(Parser, Debug)]
#[command(name = "evendeg", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Master seed. Required by every randomized subcommand.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: log::LevelFilter,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a G(n, p) sample or a named graph in the text format.
    Gen(GenArgs),
    /// Decide even-degeneracy of a graph and print a JSON verdict.
    Check(CheckArgs),
    /// Run a (U, W)-removal, a double removal or the recursive certifier.
    Remove(RemoveArgs),
    /// Check a parity-uniformity inequality on one instance.
    Stats(StatsArgs),
    /// Run a Monte Carlo sweep described by a JSON spec.
    Experiment(ExperimentArgs),
    /// Iterate the failure-bound recurrence.
    Recurrence(RecurrenceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Empty,
    Complete,
    Cycle,
    Path,
    Star,
    Petersen,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Vertex count (leaf count for `--family star`).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Write a fixed graph instead of sampling.
    #[arg(long, value_enum, conflicts_with = "p")]
    pub family: Option<Family>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Exit with status 1 unless the graph is even-degenerate.
    #[arg(long)]
    pub expect_degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RemoveMode {
    Uw,
    Double,
    Recursive,
}

#[derive(Args, Debug)]
pub struct RemoveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Revelation JSON; default reveals nothing but the edge-count parity.
    #[arg(long)]
    pub revelation: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long)]
    pub s_factor: Option<f64>,
    #[arg(long)]
    pub eta: Option<usize>,
    #[arg(long, value_enum, default_value = "uw")]
    pub mode: RemoveMode,
    /// Write the full transcript or trail as JSON.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Exit with status 1 if the procedure fails.
    #[arg(long)]
    pub expect_success: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    SingleParity,
    Layered,
    Transformed,
    Affected,
    Bipartite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatsMode {
    Exact,
    Mc,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long, value_enum)]
    pub lemma: Lemma,
    /// Inline JSON object or path to a JSON file.
    #[arg(long)]
    pub params: String,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: StatsMode,
    /// Samples in Monte Carlo mode.
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// CSV output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RecurrenceArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub horizon: usize,
    /// Bound table CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Outcome of a subcommand that ran to completion.
pub enum Outcome {
    Ok,
    /// The computation finished but the expected property does not hold.
    DomainFailure(String),
}

/// Failures that stop a subcommand.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(Error::Json(e))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().filter_level(cli.global.log_level).target(env_logger::Target::Stderr).init();
    if let Some(threads) = cli.global.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = commands::run(&cli);
    let _ = std::io::stdout().flush();
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::DomainFailure(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible(_) | Error::Capacity(_) | Error::Inapplicable(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
