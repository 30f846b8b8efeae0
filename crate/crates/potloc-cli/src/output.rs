//! Shared output formatting: comment-headed CSV documents with
//! deterministic, full-precision number rendering.

use std::path::Path;

use potloc::DiscrepancyStatus;

use crate::config::ExperimentConfig;
use crate::fail::CliError;

/// Renders a float with 17 significant digits, enough to round-trip f64.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

/// One `# key = value` comment line.
pub fn comment(key: &str, value: impl AsRef<str>) -> String {
    format!("# {key} = {}\n", value.as_ref())
}

/// The opening comment block every document starts with.
pub fn document_header(subcommand: &str, config: &ExperimentConfig) -> Result<String, CliError> {
    let echo = serde_json::to_string(config)
        .map_err(|e| CliError::Config(format!("cannot re-serialize configuration: {e}")))?;
    Ok(format!("# potloc {subcommand}\n# config = {echo}\n"))
}

pub fn status_name(status: DiscrepancyStatus) -> &'static str {
    match status {
        DiscrepancyStatus::Converged => "converged",
        DiscrepancyStatus::LowerCapped => "lower_capped",
        DiscrepancyStatus::UpperCapped => "upper_capped",
    }
}

pub fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
