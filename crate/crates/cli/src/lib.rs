//! The `asz` command line: argument handling, the commands and their output.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use crate::config::{Cli, RunConfig};
use crate::output::{write_run, RunManifest};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] asz::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Exit status for a run whose `--check` found a mismatch.
pub const EXIT_CHECK_FAILED: i32 = 2;

/// Parses, runs and writes one command. Returns the process exit status:
/// 0 on success, 1 for bad input or a failed computation, 2 when `--check`
/// finds an identity that does not hold.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match config::with_config_file(args).map(Cli::try_parse_from) {
        Ok(Ok(cli)) => cli,
        Ok(Err(e)) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    exit_code(RunConfig::from_cli(cli).and_then(|cfg| run_config(&cfg)))
}

/// Runs the command on a pool of `cfg.jobs` workers (0: one per core) and
/// returns its outcome with the pool size actually used.
pub fn execute_with_jobs(cfg: &RunConfig) -> Result<(commands::Outcome, usize), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| commands::execute(cfg))?;
    Ok((outcome, pool.current_num_threads()))
}

fn exit_code(result: Result<Option<bool>, CliError>) -> i32 {
    match result {
        Ok(Some(false)) => EXIT_CHECK_FAILED,
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs an already parsed configuration and writes its outputs. Returns the
/// `--check` verdict.
pub fn run_config(cfg: &RunConfig) -> Result<Option<bool>, CliError> {
    let start = Instant::now();
    let (outcome, jobs) = execute_with_jobs(cfg)?;
    let csv = outcome.table.to_csv()?;
    let manifest = RunManifest {
        command: cfg.command.name().to_string(),
        params: serde_json::to_value(&cfg.opts)?,
        seed: cfg.opts.seed,
        jobs,
        cap: cfg.cap,
        wall_time_secs: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        check: outcome.check,
        outputs: Vec::new(),
        summary: outcome.summary.clone(),
    };
    let path = write_run(&cfg.out, cfg.command.name(), &csv, manifest)?;
    println!("{}: {} rows, manifest {}", cfg.command.name(), outcome.table.rows.len(), path.display());
    println!("{}", serde_json::to_string(&outcome.summary)?);
    if let Some(ok) = outcome.check {
        println!("check: {}", if ok { "ok" } else { "FAILED" });
    }
    Ok(outcome.check)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(Ok(None)), 0);
        assert_eq!(exit_code(Ok(Some(true))), 0);
        assert_eq!(exit_code(Ok(Some(false))), EXIT_CHECK_FAILED);
        assert_eq!(exit_code(Err(CliError::Usage("x".into()))), 1);
        assert_eq!(exit_code(Err(asz::Error::NotPrime(4).into())), 1);
    }
}
