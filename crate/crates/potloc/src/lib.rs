//! Localization of planar potential sources from boundary observations.
//!
//! Unknown compactly supported sources inside a closed observation contour
//! produce a logarithmic (Newtonian) potential whose values on the contour
//! are measurable. This crate recovers where those sources sit: it replaces
//! the volume source by an equivalent single layer on the boundary of a
//! candidate rectangular window, fits the layer density to the observed
//! data, and slides the window to find the positions that explain the data
//! best.
//!
//! The pieces, bottom to top:
//!
//! * [`geometry`] — elliptical observation contours and rectangular window
//!   boundaries discretized into flat segments;
//! * [`forward`] — closed-form boundary data for uniform disk sources, a
//!   brute-force quadrature cross-check, and a reproducible noise model;
//! * [`assembly`] — the dense system matrix pairing every observation point
//!   with every window segment through the logarithmic kernel;
//! * [`linalg`] — dense least squares (rank-aware, minimum-norm) and
//!   ridge-regularized solves;
//! * [`solvers`] — the three density solvers (plain least squares,
//!   ridge/Tikhonov with discrepancy-principle parameter choice, and
//!   active-set nonnegative least squares) with residual and oscillation
//!   diagnostics;
//! * [`nndd`] — the sliding-window sweep that turns per-position
//!   nonnegative fits into residual and layer-mass curves for localization.
//!
//! Everything is generic over the scalar type through the [`Real`] trait
//! (implemented for `f32` and `f64`); concrete double-precision aliases are
//! exported at the crate root. All computations are deterministic: fixed
//! inputs produce bitwise-identical outputs, including the seeded noise
//! model.
//!
//! # Example
//!
//! Synthesize boundary data for a buried disk, then localize it by sliding
//! a unit window along the horizontal axis:
//!
//! ```
//! use potloc::{
//!     ellipse_observation_points, sweep, synthesize_observations, EllipseSpec, Point2,
//!     SourceDisk, SweepConfig,
//! };
//!
//! let ellipse = EllipseSpec::new(Point2::new(0.0, 0.0), 2.0, 1.0, 32);
//! let points = ellipse_observation_points(&ellipse)?;
//! let disks = [SourceDisk::new(Point2::new(-0.2, 0.0), 0.1, 1.0)?];
//! let observations = synthesize_observations(&disks, &points)?;
//!
//! let grid = vec![-0.5, -0.25, 0.0, 0.25, 0.5];
//! let config = SweepConfig::new(1.0, 1.0, 4, 4, grid, 0.0);
//! let report = sweep(&observations, &ellipse, &config)?;
//!
//! // The residual plateau always contains the best-fit position.
//! assert!(report.plateau.contains(&report.best_x0));
//! # Ok::<(), potloc::Error>(())
//! ```

pub mod assembly;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod linalg;
pub mod nndd;
pub mod rng;
mod scalar;

pub mod solvers;

pub use assembly::{assemble_matrix, log_kernel, KernelMatrix};
pub use error::{Error, Result};
pub use forward::{
    disk_potential_exterior, perturb, sample_std_dev, synthesize_observations,
    volume_quadrature_oracle, NoiseSpec, ObservationSet, SourceDisk,
};
pub use geometry::{
    ellipse_observation_points, rectangle_boundary_segments, DiscretizedContour, EllipseSpec,
    Point2, RectangleSpec, Segment,
};
pub use linalg::{least_squares, norm2, tikhonov_solve, DenseMatrix};
pub use nndd::{
    evaluate_window, layer_mass, mass_sweep_argmax, sweep, SweepConfig, SweepRecord, SweepReport,
    DEFAULT_PLATEAU_TOLERANCE,
};
pub use rng::{NormalSampler, SplitMix64};
pub use scalar::Real;
pub use solvers::{
    choose_alpha_discrepancy, count_sign_changes, solve_lsq, solve_nnls, solve_tikhonov,
    AlphaSelection, DiscrepancyStatus, NnlsOptions, SolveResult, SolverKind,
};

/// Double-precision aliases for the central types.
pub type Point2F64 = geometry::Point2<f64>;
pub type SegmentF64 = geometry::Segment<f64>;
pub type EllipseSpecF64 = geometry::EllipseSpec<f64>;
pub type RectangleSpecF64 = geometry::RectangleSpec<f64>;
pub type DenseMatrixF64 = linalg::DenseMatrix<f64>;
pub type SourceDiskF64 = forward::SourceDisk<f64>;
pub type ObservationSetF64 = forward::ObservationSet<f64>;
pub type NoiseSpecF64 = forward::NoiseSpec<f64>;
pub type SolveResultF64 = solvers::SolveResult<f64>;
pub type NnlsOptionsF64 = solvers::NnlsOptions<f64>;
pub type SweepConfigF64 = nndd::SweepConfig<f64>;
pub type SweepReportF64 = nndd::SweepReport<f64>;

/// Single-precision aliases for the central types.
pub type Point2F32 = geometry::Point2<f32>;
pub type SegmentF32 = geometry::Segment<f32>;
pub type EllipseSpecF32 = geometry::EllipseSpec<f32>;
pub type RectangleSpecF32 = geometry::RectangleSpec<f32>;
pub type DenseMatrixF32 = linalg::DenseMatrix<f32>;
pub type SourceDiskF32 = forward::SourceDisk<f32>;
pub type ObservationSetF32 = forward::ObservationSet<f32>;
pub type NoiseSpecF32 = forward::NoiseSpec<f32>;
pub type SolveResultF32 = solvers::SolveResult<f32>;
pub type NnlsOptionsF32 = solvers::NnlsOptions<f32>;
pub type SweepConfigF32 = nndd::SweepConfig<f32>;
pub type SweepReportF32 = nndd::SweepReport<f32>;
