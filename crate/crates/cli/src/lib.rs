//! Command-line surface of the evaluation toolkit: batch evaluation,
//! leaderboard ranking, inverse-consistency checks, metric correlation,
//! runtime measurement, synthetic cohorts and the reference registration.

pub mod args;
pub mod cmd;
pub mod io;
pub mod manifest;

use std::process::ExitCode;

pub use args::{Cli, Command, Units};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable configuration or inconsistent inputs.
    #[error("{0}")]
    Usage(String),
    /// The command ran but could not produce its result.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<regeval::Error> for CliError {
    fn from(e: regeval::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Runs `f` on a pool of `jobs` workers (all cores when `None`).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    #[cfg(feature = "parallel")]
    {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = jobs {
            if n == 0 {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            b = b.num_threads(n);
        }
        let pool = b.build().map_err(|e| CliError::Failed(e.to_string()))?;
        Ok(pool.install(f))
    }
    #[cfg(not(feature = "parallel"))]
    {
        if jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        Ok(f())
    }
}

pub fn run(cli: Cli) -> CliResult<ExitCode> {
    let jobs = cli.jobs;
    with_jobs(jobs, move || cmd::dispatch(cli))?
}
