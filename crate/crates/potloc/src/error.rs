//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failures reported by geometry, assembly, solvers and sweeps.
///
/// Diagnostic payloads (iterates, partial sweep records) are stored as `f64`
/// regardless of the working scalar so the error type stays non-generic.
#[derive(Debug, Error)]
pub enum Error {
    /// An input specification violated one of its invariants.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// Two containers that must agree in length did not.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// An evaluation point lies strictly inside a source disk.
    #[error("evaluation point ({x1}, {x2}) lies strictly inside a source disk")]
    InsideDisk { x1: f64, x2: f64 },

    /// An observation point lies strictly inside one of the source disks.
    #[error("observation point {point_index} lies strictly inside source disk {disk_index}")]
    PointInsideDisk {
        point_index: usize,
        disk_index: usize,
    },

    /// The logarithmic kernel was evaluated at (nearly) coincident points.
    #[error("kernel singularity: |x - y| = {distance:e} is below {threshold:e}")]
    KernelSingularity { distance: f64, threshold: f64 },

    /// An observation point (nearly) coincides with a contour segment center.
    #[error(
        "observation point {row} and segment center {col} are {distance:e} apart, below {threshold:e}"
    )]
    CoincidentNodes {
        row: usize,
        col: usize,
        distance: f64,
        threshold: f64,
    },

    /// An iterative solver hit its iteration cap before certifying optimality.
    #[error(
        "solver stopped after {iterations} iterations with optimality violation {kkt_violation:e}"
    )]
    NonConvergence {
        iterations: usize,
        /// Largest violation of the first-order optimality conditions.
        kkt_violation: f64,
        /// Best feasible iterate found so far.
        best_density: Vec<f64>,
        /// Residual norm of the best iterate.
        residual_norm: f64,
    },

    /// A single window evaluation inside a sweep failed.
    #[error("window evaluation at x0 = {x0} failed: {source}")]
    WindowEvaluation {
        x0: f64,
        #[source]
        source: Box<Error>,
    },

    /// A sweep aborted; records completed before the failure are attached.
    #[error("sweep aborted after {} completed window positions: {source}", partial.len())]
    SweepAborted {
        partial: Vec<crate::nndd::SweepRecord<f64>>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True when the error (or its cause chain) is an iteration-cap failure.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            Error::NonConvergence { .. } => true,
            Error::WindowEvaluation { source, .. } => source.is_non_convergence(),
            Error::SweepAborted { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}
