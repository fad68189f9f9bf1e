//! Error classes mapped onto the process exit-code contract:
//! 0 success, 1 runtime/data error, 2 usage error.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// The invocation itself is wrong: unknown preset/schedule/mode names,
    /// contradictory flags. Exit code 2.
    Usage(String),
    /// The invocation is fine but the data or environment is not: parse
    /// failures, schema mismatches, infeasible schedules, I/O. Exit code 1.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("i/o error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
