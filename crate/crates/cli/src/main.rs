//! `hypnap`: realize, Napoleonize, iterate and certify hyperbolic triangles.
//!
//! Exit codes: 0 success, 1 internal consistency failure, 2 invalid input,
//! 3 certification violation.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypnap_core::format::{error_json, Json};
use hypnap_core::{Error, Orientation};

#[derive(Parser, Debug)]
#[command(
    name = "hypnap",
    version,
    about = "Napoleonization of triangles in the hyperbolic plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a triangle with the given congruence class.
    Realize(Common),
    /// Napoleonize a class or a triangle.
    Napoleonize(Common),
    /// Iterate Napoleonization and write the trajectory.
    Iterate(Common),
    /// Check the non-existence certificate over a grid of classes.
    Certify(Common),
    /// Monte Carlo check of the per-class bounds on seeded random classes.
    Sweep(Common),
    /// Poincaré disk coordinates of a triangle, its apexes and its Napoleonization.
    Project(Common),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_epsilon(s: &str) -> Result<Orientation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Congruence class `d0,d1,d2`.
    #[arg(long, conflicts_with = "triangle")]
    class: Option<String>,
    /// JSON file `{"vertices": [[x0,x1,x2], ...]}`.
    #[arg(long)]
    triangle: Option<PathBuf>,
    /// Flank orientation, +1 or -1.
    #[arg(long, default_value = "+1", allow_hyphen_values = true, value_parser = parse_epsilon)]
    epsilon: Orientation,
    /// Maximum number of iteration steps.
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Point-limit tolerance (iterate) or classification tolerance (napoleonize).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    grid_min: Option<f64>,
    #[arg(long)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_step: Option<f64>,
    /// Seed for random inputs (iterate without --class, sweep).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random samples (sweep).
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Upper bound on sampled d_i (iterate without --class, sweep).
    #[arg(long, default_value_t = 10.0)]
    d_max: f64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, env = "HYPNAP_THREADS", default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Why a command did not succeed.
pub enum Failure {
    Core(Error),
    Io(String),
    Usage(String),
    /// Certification found violations; the report was already written.
    Violation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn report_failure(f: Failure) -> ExitCode {
    let (json, code) = match f {
        Failure::Core(e) => {
            let code = if e.is_internal() { 1 } else { 2 };
            (error_json(&e), code)
        }
        Failure::Io(message) => (
            Json::obj([("error", Json::str("io")), ("message", Json::str(message))]),
            2,
        ),
        Failure::Usage(message) => (
            Json::obj([("error", Json::str("usage")), ("message", Json::str(message))]),
            2,
        ),
        Failure::Violation => return ExitCode::from(3),
    };
    eprint!("{}", json.render());
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return report_failure(Failure::Usage(e.to_string().trim().to_string()));
        }
    };
    let result = match cli.command {
        Command::Realize(c) => commands::realize(&c),
        Command::Napoleonize(c) => commands::napoleonize(&c),
        Command::Iterate(c) => commands::iterate(&c),
        Command::Certify(c) => commands::certify(&c),
        Command::Sweep(c) => commands::sweep(&c),
        Command::Project(c) => commands::project(&c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(f),
    }
}
