//! Command-line front end: rule and grid export, integration runs,
//! convergence sweeps and lower-bound experiments, as CSV or JSON.

pub mod args;
pub mod commands;
pub mod error;
pub mod table;

use std::fs::File;
use std::io::{BufWriter, Write};

use args::{Cli, Command};
use commands::{FoolConfig, SweepConfig};
pub use error::CliError;
use table::Table;

pub fn execute(cli: &Cli) -> Result<Table, CliError> {
    match &cli.command {
        Command::Nodes { m, kind, weight } => commands::nodes(*m, *kind, weight),
        Command::Grid { xi, d, weight } => commands::grid(*xi, *d, weight),
        Command::Integrate { integrand, xi, budget, d, weight } => {
            commands::integrate(integrand, *xi, *budget, *d, weight)
        }
        Command::Sweep { integrand, d, from, to, r, fit_skip, weight } => {
            commands::sweep(&SweepConfig { integrand, d: *d, from: *from, to: *to, r: *r, fit_skip: *fit_skip, weight })
        }
        Command::Fool { n, xi, from, to, r, d, weight } => {
            commands::fool(&FoolConfig { n: *n, xi: *xi, levels: from.zip(*to), r: *r, d: *d, weight })
        }
    }
}

/// Runs the command on a pool of the requested size and writes the result.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?;
    let table = pool.install(|| execute(cli))?;

    match &cli.output {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            table.write(cli.format, &mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            table.write(cli.format, &mut out)?;
        }
    }
    Ok(())
}
