//! Library side of the `geofol` command-line tool.

pub mod config;
pub mod report;
pub mod suite;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] geofol_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Config(_) => "ConfigError",
            CliError::Usage(_) => "UsageError",
            CliError::Io(_) => "IoError",
        }
    }

    /// Bad input exits with 2; a run that broke down midway with 1.
    pub fn exit_code(&self) -> i32 {
        use geofol_core::Error as E;
        match self {
            CliError::Core(E::Domain(_) | E::DegenerateSample(_) | E::StepUnderflow(_) | E::BlowUp(_) | E::RangeExceeded(_)) => {
                EXIT_FAIL
            }
            _ => EXIT_INPUT,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() }).to_string()
    }
}
