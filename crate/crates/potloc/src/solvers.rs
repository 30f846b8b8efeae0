//! Density-recovery solvers: unconstrained least squares, ridge-regularized
//! least squares with optional discrepancy-principle parameter selection,
//! and active-set nonnegative least squares.
//!
//! All three consume the dense kernel matrix and a boundary-data vector and
//! return a [`SolveResult`] carrying the recovered layer density together
//! with residual and oscillation diagnostics.

use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, max_abs, norm2, tikhonov_solve, DenseMatrix};
use crate::scalar::{real, Real};

/// Which solver produced a [`SolveResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SolverKind {
    Lsq,
    Tikhonov,
    Nnls,
}

/// Outcome of a density solve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveResult<T> {
    /// Recovered layer density, one entry per window segment in
    /// counterclockwise order.
    pub density: Vec<T>,
    /// `|| A v - f ||` recomputed from the returned density.
    pub residual_norm: T,
    /// `residual_norm / || f ||`, or zero when `f` is the zero vector.
    pub relative_residual: T,
    /// Producing solver.
    pub solver: SolverKind,
    /// Regularization parameter, recorded for the ridge solver only.
    pub alpha: Option<T>,
    /// Inner solve count for the active-set solver; zero for the direct ones.
    pub iterations: usize,
    /// Strict adjacent sign alternations along the segment ordering
    /// (negligible entries ignored); see [`count_sign_changes`].
    pub sign_changes: usize,
}

/// Tuning knobs for the active-set nonnegative solver. `None` fields take
/// data-dependent defaults at solve time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NnlsOptions<T> {
    /// Gradient tolerance for the optimality certificate. Default:
    /// `1e-10 * || A^T f ||_inf`.
    pub kkt_tolerance: Option<T>,
    /// Cap on inner unconstrained solves. Default: `3 * cols`.
    pub max_iterations: Option<usize>,
    /// Entries at or below this are treated as zero in the feasibility
    /// step. Must be positive.
    pub inner_tolerance: T,
}

impl<T: Real> Default for NnlsOptions<T> {
    fn default() -> Self {
        Self {
            kkt_tolerance: None,
            max_iterations: None,
            inner_tolerance: real(1e-12),
        }
    }
}

impl<T: Real> NnlsOptions<T> {
    pub fn validate(&self) -> Result<()> {
        if let Some(tol) = self.kkt_tolerance {
            if !(tol.is_finite() && tol > T::zero()) {
                return Err(Error::Invalid {
                    what: "NnlsOptions",
                    reason: "kkt_tolerance must be positive and finite".into(),
                });
            }
        }
        if let Some(0) = self.max_iterations {
            return Err(Error::Invalid {
                what: "NnlsOptions",
                reason: "max_iterations must be positive".into(),
            });
        }
        if !(self.inner_tolerance.is_finite() && self.inner_tolerance > T::zero()) {
            return Err(Error::Invalid {
                what: "NnlsOptions",
                reason: "inner_tolerance must be positive and finite".into(),
            });
        }
        Ok(())
    }
}

/// Counts strict adjacent sign alternations, skipping entries with
/// `|v_j| <= 1e-12 * max |v|`. An all-zero vector has no sign changes.
pub fn count_sign_changes<T: Real>(v: &[T]) -> usize {
    let m = max_abs(v);
    if m == T::zero() {
        return 0;
    }
    let threshold = real::<T>(1e-12) * m;
    let mut changes = 0;
    let mut last_positive: Option<bool> = None;
    for &x in v {
        if x.abs() <= threshold {
            continue;
        }
        let positive = x > T::zero();
        if let Some(prev) = last_positive {
            if prev != positive {
                changes += 1;
            }
        }
        last_positive = Some(positive);
    }
    changes
}

fn finish_result<T: Real>(
    a: &DenseMatrix<T>,
    f: &[T],
    density: Vec<T>,
    solver: SolverKind,
    alpha: Option<T>,
    iterations: usize,
) -> Result<SolveResult<T>> {
    let residual_norm = residual_norm(a, &density, f)?;
    let f_norm = norm2(f);
    let relative_residual = if f_norm == T::zero() {
        T::zero()
    } else {
        residual_norm / f_norm
    };
    let sign_changes = count_sign_changes(&density);
    Ok(SolveResult {
        density,
        residual_norm,
        relative_residual,
        solver,
        alpha,
        iterations,
        sign_changes,
    })
}

fn residual_norm<T: Real>(a: &DenseMatrix<T>, v: &[T], f: &[T]) -> Result<T> {
    let av = a.matvec(v)?;
    let mut acc = T::zero();
    for (p, q) in av.iter().zip(f) {
        let d = *q - *p;
        acc = acc + d * d;
    }
    Ok(acc.sqrt())
}

/// Unconstrained least-squares recovery; minimum-norm on rank-deficient
/// systems.
pub fn solve_lsq<T: Real>(a: &DenseMatrix<T>, f: &[T]) -> Result<SolveResult<T>> {
    let density = least_squares(a, f)?;
    finish_result(a, f, density, SolverKind::Lsq, None, 0)
}

/// Ridge-regularized recovery with the given `alpha >= 0`; `alpha = 0` is
/// plain least squares. The result records `alpha`.
pub fn solve_tikhonov<T: Real>(a: &DenseMatrix<T>, f: &[T], alpha: T) -> Result<SolveResult<T>> {
    let density = tikhonov_solve(a, f, alpha)?;
    finish_result(a, f, density, SolverKind::Tikhonov, Some(alpha), 0)
}

/// How a discrepancy-principle search terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DiscrepancyStatus {
    /// Bisection matched the target residual to relative `1e-3`.
    Converged,
    /// Even the smallest bracketed `alpha` (`1e-16`) leaves the residual
    /// above the target; that endpoint is returned.
    LowerCapped,
    /// Even the largest bracketed `alpha` (`1e4`) keeps the residual below
    /// the target; that endpoint is returned.
    UpperCapped,
}

/// Regularization parameter chosen by the discrepancy principle.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaSelection<T> {
    pub alpha: T,
    /// Ridge residual norm at the selected `alpha`.
    pub residual_norm: T,
    pub status: DiscrepancyStatus,
}

const ALPHA_BRACKET_LO: f64 = 1e-16;
const ALPHA_BRACKET_HI: f64 = 1e4;
const DISCREPANCY_REL_TOL: f64 = 1e-3;
const DISCREPANCY_MAX_BISECT: usize = 200;

/// Selects `alpha` so the ridge residual matches `tau * noise_level`
/// (discrepancy principle), bisecting on `ln alpha` over `[1e-16, 1e4]`
/// and exploiting the monotonicity of the residual in `alpha`.
///
/// When the target is unreachable inside the bracket, the nearer endpoint
/// is returned with the corresponding capped status instead of an error.
/// Requires `noise_level > 0` and `tau >= 1`.
pub fn choose_alpha_discrepancy<T: Real>(
    a: &DenseMatrix<T>,
    f_noisy: &[T],
    noise_level: T,
    tau: T,
) -> Result<AlphaSelection<T>> {
    if !(noise_level.is_finite() && noise_level > T::zero()) {
        return Err(Error::Invalid {
            what: "noise_level",
            reason: "must be positive and finite".into(),
        });
    }
    if !(tau.is_finite() && tau >= T::one()) {
        return Err(Error::Invalid {
            what: "tau",
            reason: "must be finite and at least 1".into(),
        });
    }
    let target = tau * noise_level;
    let rel_tol = real::<T>(DISCREPANCY_REL_TOL);
    let res_at = |alpha: T| -> Result<T> {
        let v = tikhonov_solve(a, f_noisy, alpha)?;
        residual_norm(a, &v, f_noisy)
    };

    let lo = real::<T>(ALPHA_BRACKET_LO);
    let hi = real::<T>(ALPHA_BRACKET_HI);
    let res_lo = res_at(lo)?;
    if res_lo > target {
        return Ok(AlphaSelection {
            alpha: lo,
            residual_norm: res_lo,
            status: DiscrepancyStatus::LowerCapped,
        });
    }
    let res_hi = res_at(hi)?;
    if res_hi < target {
        return Ok(AlphaSelection {
            alpha: hi,
            residual_norm: res_hi,
            status: DiscrepancyStatus::UpperCapped,
        });
    }

    // Invariant: res(ln_lo) <= target <= res(ln_hi).
    let mut ln_lo = lo.ln();
    let mut ln_hi = hi.ln();
    let half = real::<T>(0.5);
    let mut alpha = lo;
    let mut res = res_lo;
    for _ in 0..DISCREPANCY_MAX_BISECT {
        let ln_mid = (ln_lo + ln_hi) * half;
        alpha = ln_mid.exp();
        res = res_at(alpha)?;
        if (res - target).abs() <= rel_tol * target {
            return Ok(AlphaSelection {
                alpha,
                residual_norm: res,
                status: DiscrepancyStatus::Converged,
            });
        }
        if res > target {
            ln_hi = ln_mid;
        } else {
            ln_lo = ln_mid;
        }
    }
    // The residual is continuous and monotone in alpha, so the bracket has
    // collapsed far below the answer's precision by now; report the final
    // midpoint.
    Ok(AlphaSelection {
        alpha,
        residual_norm: res,
        status: DiscrepancyStatus::Converged,
    })
}

/// Active-set nonnegative least squares (Lawson-Hanson).
///
/// Starts from the zero density with an empty passive set; repeatedly moves
/// the most-positive-gradient index into the passive set (ties to the
/// smaller index), solves the unconstrained subproblem on the passive
/// columns, and line-searches back to the cone boundary whenever the
/// subproblem leaves it. On success the result satisfies the optimality
/// certificate: with `w = A^T (f - A v)`, every free index has
/// `w_j <= kkt_tolerance` and every positive index has
/// `|w_j| <= kkt_tolerance`.
///
/// Exceeding `max_iterations` inner solves yields a non-convergence error
/// carrying the best iterate found and its certificate violation.
pub fn solve_nnls<T: Real>(
    a: &DenseMatrix<T>,
    f: &[T],
    options: &NnlsOptions<T>,
) -> Result<SolveResult<T>> {
    options.validate()?;
    if f.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            context: "solve_nnls",
            expected: a.rows(),
            actual: f.len(),
        });
    }
    if !f.iter().all(|x| x.is_finite()) {
        return Err(Error::Invalid {
            what: "right-hand side",
            reason: "entries must be finite".into(),
        });
    }

    let n = a.cols();
    let atf = a.transpose_matvec(f)?;
    let kkt_tol = options
        .kkt_tolerance
        .unwrap_or_else(|| real::<T>(1e-10) * max_abs(&atf));
    let max_iterations = options.max_iterations.unwrap_or(3 * n);
    let inner_tol = options.inner_tolerance;

    let mut v = vec![T::zero(); n];
    let mut passive: Vec<usize> = Vec::new();
    let mut in_passive = vec![false; n];
    let mut iterations = 0usize;

    let gradient = |v: &[T]| -> Result<Vec<T>> {
        let av = a.matvec(v)?;
        let r: Vec<T> = f.iter().zip(&av).map(|(q, p)| *q - *p).collect();
        a.transpose_matvec(&r)
    };

    loop {
        let w = gradient(&v)?;
        // Most positive gradient among free indices; the smallest index wins
        // ties, and a NaN gradient entry never becomes a candidate (testing
        // for Greater, not its negation).
        let mut candidate: Option<(usize, T)> = None;
        for j in 0..n {
            if in_passive[j] || w[j].partial_cmp(&kkt_tol) != Some(Ordering::Greater) {
                continue;
            }
            match candidate {
                Some((_, best)) if w[j].partial_cmp(&best) != Some(Ordering::Greater) => {}
                _ => candidate = Some((j, w[j])),
            }
        }
        let Some((j_new, _)) = candidate else {
            break; // Certificate satisfied: optimal.
        };
        passive.push(j_new);
        passive.sort_unstable();
        in_passive[j_new] = true;

        // Inner loop: restore feasibility of the passive-set subproblem.
        loop {
            if iterations >= max_iterations {
                let w_now = gradient(&v)?;
                let mut violation = T::zero();
                for j in 0..n {
                    let excess = if v[j] > T::zero() {
                        w_now[j].abs()
                    } else {
                        w_now[j]
                    };
                    violation = violation.max(excess);
                }
                return Err(Error::NonConvergence {
                    iterations,
                    kkt_violation: violation.to_f64().unwrap_or(f64::NAN),
                    best_density: v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
                    residual_norm: residual_norm(a, &v, f)?.to_f64().unwrap_or(f64::NAN),
                });
            }
            let sub = a.select_columns(&passive)?;
            let z = least_squares(&sub, f)?;
            iterations += 1;

            if z.iter().all(|&zp| zp > inner_tol) {
                for x in v.iter_mut() {
                    *x = T::zero();
                }
                for (p, &j) in passive.iter().enumerate() {
                    v[j] = z[p];
                }
                break;
            }

            // Step from v toward z, stopping at the first coordinate that
            // would leave the cone.
            let mut step = T::infinity();
            for (p, &j) in passive.iter().enumerate() {
                if z[p] <= inner_tol {
                    let denom = v[j] - z[p];
                    if denom > T::zero() {
                        step = step.min(v[j] / denom);
                    } else {
                        step = T::zero();
                    }
                }
            }
            if !step.is_finite() {
                step = T::zero();
            }
            for (p, &j) in passive.iter().enumerate() {
                v[j] = v[j] + step * (z[p] - v[j]);
            }
            // Drop coordinates pinned at the boundary.
            let mut kept = Vec::with_capacity(passive.len());
            for &j in &passive {
                if v[j] > inner_tol {
                    kept.push(j);
                } else {
                    v[j] = T::zero();
                    in_passive[j] = false;
                }
            }
            passive = kept;
            if passive.is_empty() {
                break;
            }
        }
    }

    finish_result(a, f, v, SolverKind::Nnls, None, iterations)
}
