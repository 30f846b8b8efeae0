//! Process-level error classification: every failure maps to a documented
//! exit code (2 = invalid configuration, 3 = solver non-convergence,
//! 4 = I/O failure).

use std::fmt;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    /// The configuration could not be parsed or failed validation.
    Config(String),
    /// The computation rejected its inputs or did not converge.
    Lib(potloc::Error),
    /// Reading the configuration or writing the output failed.
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Lib(e) => {
                if e.is_non_convergence() {
                    3
                } else {
                    2
                }
            }
            CliError::Io { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "invalid configuration: {msg}"),
            CliError::Lib(e) => write!(f, "{}", error_chain(e)),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<potloc::Error> for CliError {
    fn from(e: potloc::Error) -> Self {
        CliError::Lib(e)
    }
}

/// Renders an error and its sources as a single line.
pub fn error_chain(e: &dyn std::error::Error) -> String {
    let mut text = e.to_string();
    let mut cursor = e.source();
    while let Some(source) = cursor {
        text.push_str(": ");
        text.push_str(&source.to_string());
        cursor = source.source();
    }
    text
}
