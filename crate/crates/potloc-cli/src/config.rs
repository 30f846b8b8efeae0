//! Experiment configuration: one JSON document describing geometry, sources,
//! noise, solver, and (optionally) a sweep grid. Everything is validated
//! before any computation runs.

use std::path::{Path, PathBuf};

use potloc::{EllipseSpec, NnlsOptions, NoiseSpec, RectangleSpec, SourceDisk, SweepConfig};
use serde::{Deserialize, Serialize};

use crate::fail::CliError;

/// Which density-recovery method a `solve` run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverChoice {
    #[serde(rename = "LSQ")]
    Lsq,
    Tikhonov,
    #[serde(rename = "NNLS")]
    Nnls,
}

impl SolverChoice {
    pub fn name(self) -> &'static str {
        match self {
            SolverChoice::Lsq => "LSQ",
            SolverChoice::Tikhonov => "Tikhonov",
            SolverChoice::Nnls => "NNLS",
        }
    }
}

/// Discrepancy-principle settings, used by `solver = "Tikhonov"` when no
/// fixed `alpha` is given.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscrepancySection {
    /// Safety factor `tau >= 1` on the noise level.
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Estimate of the data-error norm `||f_noisy - f||`. When omitted it is
    /// derived from the `noise` section as `delta * s(f_noisy) * sqrt(M)`,
    /// with `s` the sample standard deviation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_level: Option<f64>,
}

fn default_tau() -> f64 {
    1.0
}

/// Optional tuning for the nonnegative solver used by sweeps.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptionsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kkt_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_tolerance: Option<f64>,
}

impl SolverOptionsSection {
    pub fn to_options(&self) -> NnlsOptions<f64> {
        let defaults: NnlsOptions<f64> = NnlsOptions::default();
        NnlsOptions {
            kkt_tolerance: self.kkt_tolerance,
            max_iterations: self.max_iterations,
            inner_tolerance: self.inner_tolerance.unwrap_or(defaults.inner_tolerance),
        }
    }
}

/// Window geometry and center grid for the `sweep` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub window_width: f64,
    pub window_height: f64,
    /// Segments per horizontal window side.
    pub n_horizontal: usize,
    /// Segments per vertical window side.
    pub n_vertical: usize,
    /// Window-center abscissas, strictly increasing. Default: -0.6 to 0.6
    /// in steps of 0.05.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0_values: Option<Vec<f64>>,
    /// Fixed window-center ordinate (default 0).
    #[serde(default)]
    pub y0: f64,
    /// Relative residual slack defining the plateau (default 0.10).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_options: Option<SolverOptionsSection>,
}

/// The built-in sweep grid: x0 from -0.6 to 0.6 in steps of 0.05.
pub fn default_x0_grid() -> Vec<f64> {
    (0..=24).map(|k| (f64::from(k) - 12.0) / 20.0).collect()
}

impl SweepSection {
    pub fn to_sweep_config(&self) -> SweepConfig<f64> {
        let x0_values = self.x0_values.clone().unwrap_or_else(default_x0_grid);
        let mut config = SweepConfig::new(
            self.window_width,
            self.window_height,
            self.n_horizontal,
            self.n_vertical,
            x0_values,
            self.y0,
        );
        if let Some(options) = &self.solver_options {
            config.solver_options = options.to_options();
        }
        if let Some(tolerance) = self.plateau_tolerance {
            config.plateau_tolerance = tolerance;
        }
        config
    }
}

/// A complete experiment description. Field names match the JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ellipse: EllipseSpec<f64>,
    pub disks: Vec<SourceDisk<f64>>,
    pub window: RectangleSpec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec<f64>>,
    pub solver: SolverChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<DiscrepancySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    pub output_path: PathBuf,
}

impl ExperimentConfig {
    /// Reads and validates a configuration file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Cross-field validation shared by all subcommands.
    fn validate(&self) -> Result<(), CliError> {
        self.ellipse.validate()?;
        self.window.validate()?;
        for disk in &self.disks {
            disk.validate()?;
        }
        if let Some(noise) = &self.noise {
            // Re-run the constructor checks on the deserialized fields.
            NoiseSpec::new(noise.delta, noise.seed)?;
        }
        if let Some(alpha) = self.alpha {
            if self.solver != SolverChoice::Tikhonov {
                return Err(CliError::Config(
                    "\"alpha\" is only meaningful with solver = \"Tikhonov\"".into(),
                ));
            }
            if !(alpha.is_finite() && alpha >= 0.0) {
                return Err(CliError::Config(
                    "\"alpha\" must be finite and nonnegative".into(),
                ));
            }
        }
        if let Some(discrepancy) = &self.discrepancy {
            if self.solver != SolverChoice::Tikhonov {
                return Err(CliError::Config(
                    "\"discrepancy\" is only meaningful with solver = \"Tikhonov\"".into(),
                ));
            }
            if self.alpha.is_some() {
                return Err(CliError::Config(
                    "provide either \"alpha\" or \"discrepancy\", not both".into(),
                ));
            }
            if !(discrepancy.tau.is_finite() && discrepancy.tau >= 1.0) {
                return Err(CliError::Config(
                    "\"discrepancy.tau\" must be finite and at least 1".into(),
                ));
            }
            match discrepancy.noise_level {
                Some(level) if !(level.is_finite() && level > 0.0) => {
                    return Err(CliError::Config(
                        "\"discrepancy.noise_level\" must be finite and positive".into(),
                    ));
                }
                None if self.noise.is_none() => {
                    return Err(CliError::Config(
                        "\"discrepancy\" without \"noise_level\" needs a \"noise\" section \
                         to derive the data-error estimate from"
                            .into(),
                    ));
                }
                _ => {}
            }
        }
        if self.solver == SolverChoice::Tikhonov
            && self.alpha.is_none()
            && self.discrepancy.is_none()
        {
            return Err(CliError::Config(
                "solver = \"Tikhonov\" requires either \"alpha\" or a \"discrepancy\" section"
                    .into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            sweep.to_sweep_config().validate(&self.ellipse)?;
        }
        Ok(())
    }
}
