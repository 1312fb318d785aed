mod args;
mod commands;
mod input;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Errors caused by what the user asked for, reported with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(value) = std::env::var("FXEXP_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            UsageError(format!(
                "FXEXP_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| UsageError(format!("cannot size thread pool: {e}")))
}

fn main() -> ExitCode {
    // clap exits with status 2 on flag errors.
    let cli = Cli::parse();
    let result = configure_threads()
        .map_err(anyhow::Error::from)
        .and_then(|()| commands::run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
