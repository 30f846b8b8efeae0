//! Sliding-window source localization.
//!
//! The window — an axis-aligned rectangle strictly inside the observation
//! contour — is swept along a grid of center abscissas. At each position the
//! nonnegative solver fits a single-layer density on the window boundary to
//! the observed data; the residual curve dips into a plateau exactly when
//! the window covers the sources, and the layer mass curve peaks near them.
//! The sweep report carries both curves plus the argmin position and the
//! residual plateau.

use crate::error::{Error, Result};
use crate::forward::ObservationSet;
use crate::geometry::{
    rectangle_boundary_segments, DiscretizedContour, EllipseSpec, Point2, RectangleSpec,
};
use crate::scalar::{real, Real};
use crate::solvers::{solve_nnls, NnlsOptions};

/// Default relative half-width of the residual plateau.
pub const DEFAULT_PLATEAU_TOLERANCE: f64 = 0.10;

/// Window-sweep configuration: a fixed-size rectangle slid along the `x1`
/// axis at ordinate `y0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig<T> {
    pub window_width: T,
    pub window_height: T,
    /// Segments per horizontal side.
    pub n_horizontal: usize,
    /// Segments per vertical side.
    pub n_vertical: usize,
    /// Window-center abscissas, strictly increasing.
    pub x0_values: Vec<T>,
    /// Fixed window-center ordinate.
    pub y0: T,
    pub solver_options: NnlsOptions<T>,
    /// Relative residual slack defining the plateau:
    /// `residual <= (1 + plateau_tolerance) * min residual`.
    pub plateau_tolerance: T,
}

impl<T: Real> SweepConfig<T> {
    /// Configuration with default solver options and plateau tolerance.
    pub fn new(
        window_width: T,
        window_height: T,
        n_horizontal: usize,
        n_vertical: usize,
        x0_values: Vec<T>,
        y0: T,
    ) -> Self {
        Self {
            window_width,
            window_height,
            n_horizontal,
            n_vertical,
            x0_values,
            y0,
            solver_options: NnlsOptions::default(),
            plateau_tolerance: real(DEFAULT_PLATEAU_TOLERANCE),
        }
    }

    /// Rectangle at one sweep position.
    pub fn window_at(&self, x0: T) -> RectangleSpec<T> {
        RectangleSpec::new(
            Point2::new(x0, self.y0),
            self.window_width,
            self.window_height,
            self.n_horizontal,
            self.n_vertical,
        )
    }

    /// Checks the grid, the solver options, and — against the given
    /// observation ellipse — that every window position stays strictly
    /// inside the contour (every boundary-segment center strictly interior).
    pub fn validate(&self, ellipse: &EllipseSpec<T>) -> Result<()> {
        ellipse.validate()?;
        if self.x0_values.is_empty() {
            return Err(Error::Invalid {
                what: "SweepConfig",
                reason: "x0_values must be nonempty".into(),
            });
        }
        if !self.x0_values.iter().all(|x| x.is_finite()) {
            return Err(Error::Invalid {
                what: "SweepConfig",
                reason: "x0_values must be finite".into(),
            });
        }
        if self.x0_values.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Invalid {
                what: "SweepConfig",
                reason: "x0_values must be strictly increasing".into(),
            });
        }
        if !self.y0.is_finite() {
            return Err(Error::Invalid {
                what: "SweepConfig",
                reason: "y0 must be finite".into(),
            });
        }
        if !(self.plateau_tolerance.is_finite() && self.plateau_tolerance >= T::zero()) {
            return Err(Error::Invalid {
                what: "SweepConfig",
                reason: "plateau_tolerance must be nonnegative and finite".into(),
            });
        }
        self.solver_options.validate()?;
        for &x0 in &self.x0_values {
            let spec = self.window_at(x0);
            let window = rectangle_boundary_segments(&spec)?;
            for seg in window.segments() {
                if !ellipse.strictly_contains(seg.center) {
                    return Err(Error::Invalid {
                        what: "SweepConfig",
                        reason: format!(
                            "window at x0 = {} reaches the observation contour \
                             (segment center ({}, {}) not strictly inside)",
                            x0.to_f64().unwrap_or(f64::NAN),
                            seg.center.x1.to_f64().unwrap_or(f64::NAN),
                            seg.center.x2.to_f64().unwrap_or(f64::NAN),
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Outcome of one window evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRecord<T> {
    /// Window-center abscissa.
    pub x0: T,
    pub residual_norm: T,
    pub relative_residual: T,
    /// Layer mass of the fitted density: sum of density times segment length.
    pub mass: T,
    /// Inner solve count of the nonnegative solver.
    pub iterations: usize,
}

impl<T: Real> SweepRecord<T> {
    pub fn to_f64(&self) -> SweepRecord<f64> {
        let c = |x: T| x.to_f64().unwrap_or(f64::NAN);
        SweepRecord {
            x0: c(self.x0),
            residual_norm: c(self.residual_norm),
            relative_residual: c(self.relative_residual),
            mass: c(self.mass),
            iterations: self.iterations,
        }
    }
}

/// Full sweep outcome: records in grid order plus the localization summary.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepReport<T> {
    /// One record per grid position, in `x0_values` order.
    pub records: Vec<SweepRecord<T>>,
    /// Position of the smallest residual (ties to the smaller abscissa).
    pub best_x0: T,
    /// All positions with residual within the plateau tolerance of the
    /// minimum; always contains `best_x0`.
    pub plateau: Vec<T>,
}

/// Midpoint-rule layer mass: sum over segments of density times length.
pub fn layer_mass<T: Real>(density: &[T], contour: &DiscretizedContour<T>) -> Result<T> {
    if density.len() != contour.len() {
        return Err(Error::DimensionMismatch {
            context: "layer_mass",
            expected: contour.len(),
            actual: density.len(),
        });
    }
    let mut acc = T::zero();
    for (v, seg) in density.iter().zip(contour.segments()) {
        acc = acc + *v * seg.length;
    }
    Ok(acc)
}

/// Fits a nonnegative density on one window and summarizes the fit.
///
/// Any failure (window validation, matrix assembly, solver) is tagged with
/// the window's center abscissa.
pub fn evaluate_window<T: Real>(
    observations: &ObservationSet<T>,
    window: &RectangleSpec<T>,
    options: &NnlsOptions<T>,
) -> Result<SweepRecord<T>> {
    let x0 = window.center.x1.to_f64().unwrap_or(f64::NAN);
    evaluate_window_inner(observations, window, options).map_err(|e| Error::WindowEvaluation {
        x0,
        source: Box::new(e),
    })
}

fn evaluate_window_inner<T: Real>(
    observations: &ObservationSet<T>,
    window: &RectangleSpec<T>,
    options: &NnlsOptions<T>,
) -> Result<SweepRecord<T>> {
    let contour = rectangle_boundary_segments(window)?;
    let a = crate::assembly::assemble_matrix(observations.points(), &contour)?;
    let solve = solve_nnls(&a, observations.values(), options)?;
    let mass = layer_mass(&solve.density, &contour)?;
    Ok(SweepRecord {
        x0: window.center.x1,
        residual_norm: solve.residual_norm,
        relative_residual: solve.relative_residual,
        mass,
        iterations: solve.iterations,
    })
}

/// Slides the window across the grid, fitting each position independently.
///
/// Records are produced in grid order; `best_x0` is the residual argmin and
/// the plateau collects every position within the configured tolerance of
/// the minimum. A failed evaluation aborts the sweep, attaching the records
/// finished so far.
pub fn sweep<T: Real>(
    observations: &ObservationSet<T>,
    ellipse: &EllipseSpec<T>,
    config: &SweepConfig<T>,
) -> Result<SweepReport<T>> {
    config.validate(ellipse)?;
    if observations.is_empty() {
        return Err(Error::Invalid {
            what: "sweep observations",
            reason: "at least one observation required".into(),
        });
    }
    let mut records: Vec<SweepRecord<T>> = Vec::with_capacity(config.x0_values.len());
    for &x0 in &config.x0_values {
        let window = config.window_at(x0);
        match evaluate_window(observations, &window, &config.solver_options) {
            Ok(record) => records.push(record),
            Err(e) => {
                return Err(Error::SweepAborted {
                    partial: records.iter().map(SweepRecord::to_f64).collect(),
                    source: Box::new(e),
                });
            }
        }
    }

    let mut best_index = 0;
    for (i, rec) in records.iter().enumerate() {
        if rec.residual_norm < records[best_index].residual_norm {
            best_index = i;
        }
    }
    let min_residual = records[best_index].residual_norm;
    let threshold = (T::one() + config.plateau_tolerance) * min_residual;
    let plateau: Vec<T> = records
        .iter()
        .filter(|r| r.residual_norm <= threshold)
        .map(|r| r.x0)
        .collect();
    let best_x0 = records[best_index].x0;

    Ok(SweepReport {
        records,
        best_x0,
        plateau,
    })
}

/// Position of the largest layer mass; ties break toward the smaller
/// abscissa. Errors on a report with no records.
pub fn mass_sweep_argmax<T: Real>(report: &SweepReport<T>) -> Result<T> {
    let Some(first) = report.records.first() else {
        return Err(Error::Invalid {
            what: "mass_sweep_argmax",
            reason: "report has no records".into(),
        });
    };
    let mut best = first;
    for rec in &report.records[1..] {
        if rec.mass > best.mass {
            best = rec;
        }
    }
    Ok(best.x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{synthesize_observations, SourceDisk};
    use crate::geometry::ellipse_observation_points;
    use approx::assert_relative_eq;

    fn pt(x1: f64, x2: f64) -> Point2<f64> {
        Point2::new(x1, x2)
    }

    fn paper_ellipse(m: usize) -> EllipseSpec<f64> {
        EllipseSpec::new(pt(0.0, 0.0), 2.0, 1.0, m)
    }

    fn small_observations(m: usize) -> (ObservationSet<f64>, EllipseSpec<f64>) {
        let ellipse = paper_ellipse(m);
        let points = ellipse_observation_points(&ellipse).unwrap();
        let disks = [
            SourceDisk::new(pt(-0.2, 0.0), 0.1, 1.0).unwrap(),
            SourceDisk::new(pt(0.2, -0.2), 0.05, 1.0).unwrap(),
        ];
        let obs = synthesize_observations(&disks, &points).unwrap();
        (obs, ellipse)
    }

    #[test]
    fn layer_mass_examples() {
        let spec = RectangleSpec::new(pt(0.0, 0.0), 1.0, 1.0, 3, 2);
        let contour = rectangle_boundary_segments(&spec).unwrap();
        let zero = vec![0.0; contour.len()];
        assert_eq!(layer_mass(&zero, &contour).unwrap(), 0.0);

        let ones = vec![1.0; contour.len()];
        assert_relative_eq!(
            layer_mass(&ones, &contour).unwrap(),
            4.0,
            max_relative = 1e-12
        );

        assert!(layer_mass(&[1.0], &contour).is_err());
    }

    #[test]
    fn evaluate_window_zero_data_gives_zero_fit() {
        let ellipse = paper_ellipse(16);
        let points = ellipse_observation_points(&ellipse).unwrap();
        let n = points.len();
        let obs = ObservationSet::new(points, vec![0.0; n]).unwrap();
        let spec = RectangleSpec::new(pt(0.0, 0.0), 1.0, 1.0, 2, 2);
        let rec = evaluate_window(&obs, &spec, &NnlsOptions::default()).unwrap();
        assert_eq!(rec.residual_norm, 0.0);
        assert_eq!(rec.relative_residual, 0.0);
        assert_eq!(rec.mass, 0.0);
    }

    #[test]
    fn evaluate_window_is_deterministic() {
        let (obs, _) = small_observations(24);
        let spec = RectangleSpec::new(pt(0.0, 0.0), 1.0, 1.0, 4, 4);
        let r1 = evaluate_window(&obs, &spec, &NnlsOptions::default()).unwrap();
        let r2 = evaluate_window(&obs, &spec, &NnlsOptions::default()).unwrap();
        assert_eq!(r1.residual_norm.to_bits(), r2.residual_norm.to_bits());
        assert_eq!(r1.mass.to_bits(), r2.mass.to_bits());
        assert_eq!(r1.iterations, r2.iterations);
    }

    #[test]
    fn evaluate_window_tags_failures_with_position() {
        // An observation point placed exactly on a segment center forces an
        // assembly failure.
        let spec = RectangleSpec::new(pt(0.25, 0.0), 1.0, 1.0, 1, 1);
        let obs = ObservationSet::new(vec![pt(0.75, 0.0)], vec![1.0]).unwrap();
        let err = evaluate_window(&obs, &spec, &NnlsOptions::default()).unwrap_err();
        match err {
            Error::WindowEvaluation { x0, source } => {
                assert_eq!(x0, 0.25);
                assert!(matches!(*source, Error::CoincidentNodes { .. }));
            }
            other => panic!("expected WindowEvaluation, got {other:?}"),
        }
    }

    #[test]
    fn sweep_single_position() {
        let (obs, ellipse) = small_observations(24);
        let config = SweepConfig::new(1.0, 1.0, 3, 3, vec![0.0], 0.0);
        let report = sweep(&obs, &ellipse, &config).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.best_x0, 0.0);
        assert_eq!(report.plateau, vec![0.0]);
    }

    #[test]
    fn sweep_records_match_independent_evaluations() {
        let (obs, ellipse) = small_observations(24);
        let config = SweepConfig::new(1.0, 1.0, 3, 3, vec![-0.25, 0.0, 0.25], 0.0);
        let report = sweep(&obs, &ellipse, &config).unwrap();
        assert_eq!(report.records.len(), 3);
        for rec in &report.records {
            let window = config.window_at(rec.x0);
            let solo = evaluate_window(&obs, &window, &config.solver_options).unwrap();
            assert_eq!(rec.residual_norm.to_bits(), solo.residual_norm.to_bits());
            assert_eq!(
                rec.relative_residual.to_bits(),
                solo.relative_residual.to_bits()
            );
            assert_eq!(rec.mass.to_bits(), solo.mass.to_bits());
            assert_eq!(rec.iterations, solo.iterations);
        }
        // Masses and residuals are nonnegative throughout.
        for rec in &report.records {
            assert!(rec.mass >= 0.0);
            assert!(rec.residual_norm >= 0.0);
        }
        // The plateau contains the best position.
        assert!(report.plateau.contains(&report.best_x0));
    }

    #[test]
    fn sweep_plateau_widens_with_tolerance() {
        let (obs, ellipse) = small_observations(24);
        let mut config = SweepConfig::new(1.0, 1.0, 3, 3, vec![-0.25, 0.0, 0.25], 0.0);
        config.plateau_tolerance = 1e12;
        let report = sweep(&obs, &ellipse, &config).unwrap();
        assert_eq!(report.plateau.len(), 3);
    }

    #[test]
    fn sweep_validation_rejects_bad_grids() {
        let (obs, ellipse) = small_observations(16);
        let empty = SweepConfig::new(1.0, 1.0, 2, 2, vec![], 0.0);
        assert!(sweep(&obs, &ellipse, &empty).is_err());

        let unsorted = SweepConfig::new(1.0, 1.0, 2, 2, vec![0.0, 0.0], 0.0);
        assert!(sweep(&obs, &ellipse, &unsorted).is_err());

        let decreasing = SweepConfig::new(1.0, 1.0, 2, 2, vec![0.5, -0.5], 0.0);
        assert!(sweep(&obs, &ellipse, &decreasing).is_err());
    }

    #[test]
    fn sweep_validation_rejects_window_reaching_contour() {
        let (obs, ellipse) = small_observations(16);
        // Window center near the right vertex: segment centers leave the
        // ellipse.
        let config = SweepConfig::new(1.0, 1.0, 2, 2, vec![1.8], 0.0);
        let err = sweep(&obs, &ellipse, &config).unwrap_err();
        assert!(matches!(err, Error::Invalid { .. }));
    }

    #[test]
    fn sweep_abort_carries_partial_records() {
        let (obs, ellipse) = small_observations(24);
        let mut config = SweepConfig::new(1.0, 1.0, 3, 3, vec![-0.25, 0.0, 0.25], 0.0);
        config.solver_options.max_iterations = Some(1);
        match sweep(&obs, &ellipse, &config) {
            Err(Error::SweepAborted { partial, source }) => {
                assert!(partial.len() < 3);
                assert!(source.is_non_convergence());
            }
            Ok(_) => panic!("expected the iteration cap to abort the sweep"),
            Err(other) => panic!("expected SweepAborted, got {other:?}"),
        }
    }

    #[test]
    fn mass_argmax_examples() {
        let mk = |x0: f64, mass: f64| SweepRecord {
            x0,
            residual_norm: 1.0,
            relative_residual: 1.0,
            mass,
            iterations: 1,
        };
        let report = SweepReport {
            records: vec![mk(-1.0, 1.0), mk(0.0, 3.0), mk(1.0, 2.0)],
            best_x0: -1.0,
            plateau: vec![-1.0],
        };
        assert_eq!(mass_sweep_argmax(&report).unwrap(), 0.0);

        let single = SweepReport {
            records: vec![mk(0.7, 0.2)],
            best_x0: 0.7,
            plateau: vec![0.7],
        };
        assert_eq!(mass_sweep_argmax(&single).unwrap(), 0.7);

        // Ties break toward the smaller abscissa.
        let tied = SweepReport {
            records: vec![mk(0.0, 3.0), mk(1.0, 3.0)],
            best_x0: 0.0,
            plateau: vec![0.0],
        };
        assert_eq!(mass_sweep_argmax(&tied).unwrap(), 0.0);

        let empty: SweepReport<f64> = SweepReport {
            records: vec![],
            best_x0: 0.0,
            plateau: vec![],
        };
        assert!(mass_sweep_argmax(&empty).is_err());
    }

    #[test]
    fn single_precision_sweep_runs() {
        let ellipse: EllipseSpec<f32> = EllipseSpec::new(Point2::new(0.0f32, 0.0), 2.0, 1.0, 16);
        let points = ellipse_observation_points(&ellipse).unwrap();
        let disks = [SourceDisk::new(Point2::new(-0.2f32, 0.0), 0.1, 1.0).unwrap()];
        let obs = synthesize_observations(&disks, &points).unwrap();
        let config: SweepConfig<f32> =
            SweepConfig::new(1.0, 1.0, 2, 2, vec![-0.25, 0.0, 0.25], 0.0);
        let report = sweep(&obs, &ellipse, &config).unwrap();
        assert_eq!(report.records.len(), 3);
        assert!(report.plateau.contains(&report.best_x0));
    }
}
