//! Process-level error classes mapped to exit codes: 2 configuration,
//! 3 numerical failure, 4 strict-mode discrepancy.

use std::fmt;

use qwindow_core::CoreError;

use crate::config::ConfigError;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numeric(String),
    Strict(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Strict(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Strict(m) => write!(f, "strict mode: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Numeric(e.to_string())
    }
}
