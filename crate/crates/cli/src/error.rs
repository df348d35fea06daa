use std::fmt;

use smoothgda::Error;

/// Failure classes, each mapped to a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration, or an unwritable output path.
    Config(String),
    /// A run or instance construction failed numerically.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Config(format!("cannot write {}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::OracleFailure { .. }
            | Error::RegionViolation { .. }
            | Error::NonFinite { .. }
            | Error::Convergence { .. }
            | Error::Generation { .. } => CliError::Numerical(err.to_string()),
            _ => CliError::Config(err.to_string()),
        }
    }
}
