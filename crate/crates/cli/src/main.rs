mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qwalk_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Config(String),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 1 for configuration and input errors, 2 for violated numerical
    /// invariants, 3 when an analysis finds nothing to report.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Symmetry { .. } | Error::Unitarity { .. } | Error::Invariant(_)) => 2,
            CliError::Core(Error::PeakNotFound { .. } | Error::Empty(_)) => 3,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = config::Cli::parse();
    match commands::execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qwalk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
