//! Command-line front end. The binary is a thin wrapper around [`main`].
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 numerical failure,
//! 3 a comparison suite ran but did not pass.

mod args;
mod commands;
mod config;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command};
pub use commands::{execute, Cell, Output, Table};
pub use config::{CommandName, Ensemble, Format, ModelSpec, Options, OutputSpec, RouteChoice, RunConfig};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_COMPARISON_FAILED: i32 = 3;

/// Caps the worker count of the global thread pool.
pub const THREADS_ENV: &str = "COULOMB_LINSTAT_THREADS";

/// Merges the config file (if any) under the flags and fills defaults.
pub fn resolve_config(cli: Cli) -> Result<RunConfig> {
    let from_flags = cli.command.map(Command::into_config);
    let mut config = match (&cli.config, &from_flags) {
        (Some(path), _) => RunConfig::from_path(path)?,
        (None, Some(flags)) => RunConfig::new(flags.command),
        (None, None) => {
            return Err(Error::InvalidParameter("no subcommand and no --config given".into()))
        }
    };
    if let Some(flags) = &from_flags {
        config.overlay(flags);
    }
    config.resolve()
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV} = `{raw}` is not a positive integer")))?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

fn run(config: &RunConfig) -> Result<bool> {
    let output = execute(config)?;
    match &config.output.path {
        Some(path) => {
            let mut file = std::fs::File::create(path).map_err(commands::io_error)?;
            output.write(config, &mut file)?;
            file.flush().map_err(commands::io_error)?;
        }
        None => output.write(config, std::io::stdout().lock())?,
    }
    Ok(output.passed())
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    let outcome = resolve_config(cli).and_then(|config| run(&config));
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("comparison failed");
            EXIT_COMPARISON_FAILED
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
