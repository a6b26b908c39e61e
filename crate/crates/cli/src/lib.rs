//! Command-line plumbing for the doiforge suites: configuration, the
//! parallel runner, profile emission and the periodic demo.

pub mod config;
pub mod demo;
pub mod profiles;
pub mod runner;

use thiserror::Error;

pub use config::{FileConfig, RunConfig};
pub use runner::{run, RunOutcome, SuiteSummary};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] doiforge::Error),
}

impl CliError {
    /// Process exit status: every error is a usage, config or IO problem.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Worker count from `DOIFORGE_THREADS`; `None` lets rayon decide.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("DOIFORGE_THREADS") {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(CliError::Config(format!(
                "DOIFORGE_THREADS must be a positive integer, got '{v}'"
            ))),
            Ok(n) => Ok(Some(n)),
        },
    }
}

pub(crate) fn create_out(dir: &std::path::Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

pub(crate) fn write_file(path: &std::path::Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
