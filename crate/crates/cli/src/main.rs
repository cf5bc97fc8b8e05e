//! `camel-lab`: batch experiments for the nonlinear string equation and the
//! camel / capacity toolkit.
//!
//! Exit status: 0 on success, 1 on invalid input or runtime failure, 2 when
//! a checked property is violated.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use camel_lab_core::Error;
use config::FileConfig;

#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Runtime(String),
    Violation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) | Failure::Runtime(_) => 1,
            Failure::Violation(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundViolation(_) => Failure::Violation(e.to_string()),
            Error::InvalidArgument(_)
            | Error::OutOfRange { .. }
            | Error::GridTooSmall { .. }
            | Error::LengthMismatch { .. }
            | Error::Parse(_) => Failure::Invalid(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "camel-lab",
    version,
    about = "Spectral string-equation flows and coisotropic camel experiments"
)]
struct Cli {
    /// TOML config: global `seed`/`out` plus one table per subcommand. Flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Parent directory for run directories.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one initial state and write the trajectory.
    Simulate(commands::SimulateArgs),
    /// Galerkin error curve and interaction-picture approximation errors.
    Converge(commands::ConvergeArgs),
    /// Find camel points, reduce them and check the a priori bound.
    Camel(commands::CamelArgs),
    /// Optimize single-mode amplitudes and the witness cloud.
    Modes(commands::ModesArgs),
    /// Closed-form capacities of model sets.
    Capacity(commands::CapacityArgs),
    /// Bounded-energy displacement of an unbounded set.
    Displace(commands::DisplaceArgs),
    /// Composition and inverse of Hamiltonian flows.
    Algebra(commands::AlgebraArgs),
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CAMEL_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Invalid(format!("CAMEL_LAB_THREADS = `{raw}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Runtime(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let ctx = commands::Context {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        out: cli
            .out
            .clone()
            .or(file.out.clone())
            .unwrap_or_else(|| PathBuf::from("runs")),
        file,
    };
    match &cli.command {
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Converge(a) => commands::converge(&ctx, a),
        Command::Camel(a) => commands::camel(&ctx, a),
        Command::Modes(a) => commands::modes(&ctx, a),
        Command::Capacity(a) => commands::capacity(&ctx, a),
        Command::Displace(a) => commands::displace(&ctx, a),
        Command::Algebra(a) => commands::algebra(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (kind, msg) = match &f {
                Failure::Invalid(m) => ("invalid input", m),
                Failure::Runtime(m) => ("error", m),
                Failure::Violation(m) => ("property violated", m),
            };
            eprintln!("camel-lab: {kind}: {msg}");
            ExitCode::from(f.code())
        }
    }
}
