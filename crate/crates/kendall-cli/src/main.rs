//! `kendall`: evaluate, simulate and compare the fluctuation laws of
//! Kendall random walks.
//!
//! Exit codes: 0 success, 1 numeric failure, 2 flag or input errors,
//! 3 statistical comparison failure.

mod args;
mod error;
mod report;
mod run;

use clap::Parser;

use crate::error::{CliError, Result};

fn main() {
    let cli = args::Cli::parse();
    if let Err(e) = configure_threads().and_then(|()| run::run(cli)) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

/// Applies the optional `KENDALL_THREADS` cap on simulation workers. The
/// estimates themselves do not depend on the worker count; the cap only
/// bounds CPU use.
fn configure_threads() -> Result<()> {
    let Some(raw) = std::env::var_os("KENDALL_THREADS") else {
        return Ok(());
    };
    let s = raw.to_string_lossy();
    let n: usize = s
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            CliError::Usage(format!("KENDALL_THREADS must be a positive integer, got {s:?}"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure {n} worker threads: {e}")))
}
