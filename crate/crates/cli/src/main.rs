use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use polyalg_cli::{run, CliError, Command, RunConfig};

/// Power-sum polynomials with values in finite-dimensional Banach algebras.
///
/// Exit status: 0 success, 1 invalid configuration, 2 computation error,
/// 3 verification failure. POLYALG_THREADS caps the worker threads (results
/// do not depend on it).
#[derive(Debug, Parser)]
#[command(name = "polyalg", version)]
struct Cli {
    /// JSON run configuration (objects, optional command, seed, tolerances).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for stochastic commands; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Command to run; defaults to the config's `command`.
    #[command(subcommand)]
    command: Option<Command>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("POLYALG_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Config(format!(
                "POLYALG_THREADS must be a positive integer, got '{value}'"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let command = cli
        .command
        .as_ref()
        .or(config.command.as_ref())
        .ok_or_else(|| {
            CliError::Config("no command given on the command line or in the config".into())
        })?;
    let outcome = run(&config, command, cli.seed)?;
    let mut text = outcome.to_json()?;
    text.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(!outcome.suite_failed)
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
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("polyalg: verification failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("polyalg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
