//! CLI error taxonomy: configuration problems exit with code 2, runtime
//! (solver/IO) failures with code 3.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// The config document is invalid: unknown key, missing unit,
    /// unsupported schema version, inconsistent scenario tables.
    Config(String),
    /// The run itself failed: a solver did not converge or an artifact
    /// could not be written.
    Runtime(String),
}

impl CliError {
    /// Process exit code for this class of failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn runtime(e: impl fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
