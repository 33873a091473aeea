//! Command-line front end for the `skew-krylov` solvers.
//!
//! Exit codes: 0 on convergence or a passing check, 2 when a method is not
//! applicable, breaks down, hits the iteration cap or a check fails, and 1
//! on usage or I/O errors.

pub mod args;
pub mod commands;
pub mod problem;

use std::path::PathBuf;

pub use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] skew_krylov::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Non-applicability, breakdown, iteration cap, or a failed check.
    Failure,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Failure => 2,
        }
    }
}

pub const USAGE_EXIT: u8 = 1;

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Experiment(a) => commands::experiment(a),
        Command::Equiv(a) => commands::equiv(a),
    }
}
