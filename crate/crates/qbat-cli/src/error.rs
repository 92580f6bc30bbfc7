//! CLI error taxonomy mapped onto process exit codes.
//!
//! Exit codes: 0 success (and all checks passing), 1 verification failure,
//! 2 usage or configuration error, 3 capability error (a well-formed request
//! the engine cannot serve, e.g. dimension caps).

use std::fmt;

/// Errors that terminate a command, carrying their exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag usage, unreadable or invalid configuration. Exit 2.
    Config(String),
    /// Valid request outside the engine's capabilities. Exit 3.
    Capability(String),
    /// Unexpected internal failure. Exit 3.
    Internal(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Capability(_) | CliError::Internal(_) => 3,
        }
    }

    /// Wraps a core error raised while interpreting user configuration.
    pub fn from_config_stage(err: qbat_core::Error, context: &str) -> Self {
        match err {
            qbat_core::Error::Unsupported(msg) => CliError::Capability(format!("{context}: {msg}")),
            other => CliError::Config(format!("{context}: {other}")),
        }
    }

    /// Wraps a core error raised while running an already-validated request.
    pub fn from_run_stage(err: qbat_core::Error) -> Self {
        match err {
            qbat_core::Error::Unsupported(msg) => CliError::Capability(msg),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Capability(msg) => write!(f, "unsupported: {msg}"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Result alias for CLI command paths.
pub type CliResult<T> = Result<T, CliError>;
