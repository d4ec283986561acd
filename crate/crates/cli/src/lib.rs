//! Library side of the `smw` command-line tool: file formats, the argument
//! definitions and one function per subcommand.
//!
//! Exit codes: 0 success, 1 I/O error or failed check, 2 parse error,
//! 3 shape mismatch, 4 graph too large for the brute-force oracle.

use std::path::Path;

use thiserror::Error;

pub mod args;
pub mod bench;
pub mod commands;
pub mod formats;

pub use args::Cli;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("graph has {0} edges, the brute-force oracle handles at most {max}", max = smw_core::oracle::MAX_ORACLE_EDGES)]
    OracleSize(usize),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::CheckFailed(_) => 1,
            CliError::Parse { .. } | CliError::Invalid(_) => 2,
            CliError::Shape(_) => 3,
            CliError::OracleSize(_) => 4,
        }
    }
}

impl From<smw_core::grid::GridError> for CliError {
    fn from(e: smw_core::grid::GridError) -> Self {
        use smw_core::grid::GridError;
        match e {
            GridError::ShapeMismatch(m) => CliError::Shape(m),
            GridError::BadOffsets(m) => CliError::Shape(format!("offsets: {m}")),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<smw_core::metrics::MetricsError> for CliError {
    fn from(e: smw_core::metrics::MetricsError) -> Self {
        use smw_core::metrics::MetricsError;
        match e {
            MetricsError::ShapeMismatch(m) => CliError::Shape(m),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<smw_core::oracle::OracleError> for CliError {
    fn from(e: smw_core::oracle::OracleError) -> Self {
        use smw_core::oracle::OracleError;
        match e {
            OracleError::TooLargeForOracle(m) => CliError::OracleSize(m),
            other => CliError::CheckFailed(other.to_string()),
        }
    }
}

/// Thread count from `SMW_THREADS`, if set to a positive integer.
pub fn thread_limit() -> Option<usize> {
    std::env::var("SMW_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = thread_limit() {
        // a second call fails if a pool already exists, which is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    commands::dispatch(cli.command)
}
