//! Acceptance gate for the shipped guarantees: nine checks, one pass/fail
//! line each under `cargo test --test acceptance`.
//!
//! The setting throughout is the two-disk reference configuration: an
//! ellipse with semi-axes 2 and 1 observed at 100 boundary points, and two
//! unit-density disk sources — radius 0.1 at (-0.2, 0) and radius 0.05 at
//! (0.2, -0.2) — with true total mass 0.0125*pi. Bounds that are not forced
//! by theory were measured once on this configuration and are pinned here
//! as regression bounds; frozen seeds keep every check deterministic.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use potloc::{
    assemble_matrix, choose_alpha_discrepancy, disk_potential_exterior, ellipse_observation_points,
    evaluate_window, norm2, perturb, rectangle_boundary_segments, sample_std_dev, solve_lsq,
    solve_nnls, solve_tikhonov, sweep, synthesize_observations, volume_quadrature_oracle,
    DenseMatrix, DiscrepancyStatus, EllipseSpec, NnlsOptions, NoiseSpec, ObservationSet, Point2,
    RectangleSpec, SourceDisk, SplitMix64, SweepConfig,
};

const TRUE_MASS: f64 = 0.0125 * PI;

fn reference_disks() -> Vec<SourceDisk<f64>> {
    vec![
        SourceDisk::new(Point2::new(-0.2, 0.0), 0.1, 1.0).unwrap(),
        SourceDisk::new(Point2::new(0.2, -0.2), 0.05, 1.0).unwrap(),
    ]
}

fn reference_observations() -> (EllipseSpec<f64>, ObservationSet<f64>) {
    let ellipse = EllipseSpec::new(Point2::new(0.0, 0.0), 2.0, 1.0, 100);
    let points = ellipse_observation_points(&ellipse).unwrap();
    let obs = synthesize_observations(&reference_disks(), &points).unwrap();
    (ellipse, obs)
}

fn unit_window(n12: usize) -> RectangleSpec<f64> {
    RectangleSpec::new(Point2::new(0.0, 0.0), 1.0, 1.0, n12, n12)
}

/// Observation-by-segment system for the centered unit window with `n12`
/// segments per horizontal and per vertical side.
fn reference_system(n12: usize) -> (DenseMatrix<f64>, ObservationSet<f64>) {
    let (_, obs) = reference_observations();
    let contour = rectangle_boundary_segments(&unit_window(n12)).unwrap();
    let a = assemble_matrix(obs.points(), &contour).unwrap();
    (a, obs)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Random system with entries and data uniform in [-1, 1]; the columns are
/// returned separately for the enumeration oracle.
fn random_system(
    rng: &mut SplitMix64,
    m: usize,
    n: usize,
) -> (DenseMatrix<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let mut data = vec![0.0; m * n];
    let mut columns = vec![vec![0.0; m]; n];
    for i in 0..m {
        for j in 0..n {
            let v = rng.next_in_range(-1.0, 1.0);
            data[i * n + j] = v;
            columns[j][i] = v;
        }
    }
    let f: Vec<f64> = (0..m).map(|_| rng.next_in_range(-1.0, 1.0)).collect();
    (DenseMatrix::from_vec(m, n, data).unwrap(), columns, f)
}

/// Verifies the stated optimality certificate independently of the solver:
/// with `w = A^T (f - A v)`, every zero entry has `w_j <= tol` and every
/// positive entry has `|w_j| <= tol`, where `tol = 1e-10 * ||A^T f||_inf`
/// (the solver's documented default).
fn assert_kkt(a: &DenseMatrix<f64>, f: &[f64], v: &[f64], label: &str) {
    let av = a.matvec(v).unwrap();
    let residual: Vec<f64> = f.iter().zip(&av).map(|(fi, avi)| fi - avi).collect();
    let w = a.transpose_matvec(&residual).unwrap();
    let tol = 1e-10 * max_abs(&a.transpose_matvec(f).unwrap());
    for (j, (&vj, &wj)) in v.iter().zip(&w).enumerate() {
        if vj > 0.0 {
            assert!(
                wj.abs() <= tol,
                "{label}: free gradient |w[{j}]| = {:.3e} exceeds {tol:.3e}",
                wj.abs()
            );
        } else {
            assert!(
                wj <= tol,
                "{label}: active gradient w[{j}] = {wj:.3e} exceeds {tol:.3e}"
            );
        }
    }
}

/// Solves the p x p normal equations (p <= 3 here) by Gaussian elimination
/// with partial pivoting; `None` when numerically singular.
fn normal_equation_solution(columns: &[&[f64]], f: &[f64]) -> Option<Vec<f64>> {
    let p = columns.len();
    let mut g = vec![0.0; p * p];
    let mut rhs = vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            g[i * p + j] = dot(columns[i], columns[j]);
        }
        rhs[i] = dot(columns[i], f);
    }
    let scale = max_abs(&g).max(1.0);
    for k in 0..p {
        let pivot = (k..p).max_by(|&r, &s| {
            g[r * p + k]
                .abs()
                .partial_cmp(&g[s * p + k].abs())
                .expect("finite pivots")
        })?;
        if g[pivot * p + k].abs() <= 1e-12 * scale {
            return None;
        }
        if pivot != k {
            for c in 0..p {
                g.swap(k * p + c, pivot * p + c);
            }
            rhs.swap(k, pivot);
        }
        for r in (k + 1)..p {
            let factor = g[r * p + k] / g[k * p + k];
            for c in k..p {
                g[r * p + c] -= factor * g[k * p + c];
            }
            rhs[r] -= factor * rhs[k];
        }
    }
    let mut z = vec![0.0; p];
    for k in (0..p).rev() {
        let mut s = rhs[k];
        for c in (k + 1)..p {
            s -= g[k * p + c] * z[c];
        }
        z[k] = s / g[k * p + k];
    }
    Some(z)
}

/// Optimal nonnegative residual by brute force: every subset of columns is
/// solved unconstrained through its normal equations, and the feasible
/// candidates (all entries nonnegative) compete on the full residual. The
/// optimum's support always appears among the subsets, so the minimum over
/// feasible candidates is the true optimal residual.
fn enumeration_residual(columns: &[Vec<f64>], f: &[f64]) -> f64 {
    let n = columns.len();
    let mut best = norm2(f); // the empty support: v = 0
    for mask in 1_u32..(1_u32 << n) {
        let chosen: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let picked: Vec<&[f64]> = chosen.iter().map(|&j| columns[j].as_slice()).collect();
        let Some(z) = normal_equation_solution(&picked, f) else {
            continue;
        };
        if z.iter().any(|&c| c < -1e-12) {
            continue;
        }
        let mut r = f.to_vec();
        for (&j, &c) in chosen.iter().zip(&z) {
            let c = c.max(0.0);
            for (ri, &aij) in r.iter_mut().zip(&columns[j]) {
                *ri -= c * aij;
            }
        }
        best = best.min(norm2(&r));
    }
    best
}

/// Closed-form boundary data agrees with brute-force area quadrature at 20
/// random boundary points to relative error 1e-6.
#[test]
fn criterion_1_analytic_boundary_data_matches_area_quadrature() {
    let disks = reference_disks();
    let mut rng = SplitMix64::new(20240917);
    for _ in 0..20 {
        let theta = 2.0 * PI * rng.next_unit();
        let x = Point2::new(2.0 * theta.cos(), theta.sin());
        let analytic: f64 = disks
            .iter()
            .map(|d| disk_potential_exterior(d, x).unwrap())
            .sum();
        let quadrature: f64 = disks
            .iter()
            .map(|d| volume_quadrature_oracle(d, x, 2048).unwrap())
            .sum();
        let rel = (analytic - quadrature).abs() / quadrature.abs();
        assert!(
            rel <= 1e-6,
            "theta = {theta:.6}: analytic {analytic:.12e} vs quadrature {quadrature:.12e} \
             (relative error {rel:.3e})"
        );
    }
}

/// The nonnegative solver delivers a certified optimum: the gradient
/// certificate holds, the solution is feasible, the residual dominates the
/// unconstrained one, and on exhaustively enumerable systems the residual
/// matches the brute-force support-enumeration optimum.
#[test]
fn criterion_2_nnls_satisfies_kkt_and_matches_enumeration() {
    let start = Instant::now();

    // Reference system: 100 observations by 200 segments.
    let (a, obs) = reference_system(50);
    let nnls = solve_nnls(&a, obs.values(), &NnlsOptions::default()).unwrap();
    let lsq = solve_lsq(&a, obs.values()).unwrap();
    assert!(nnls.density.iter().all(|&v| v >= 0.0));
    assert_kkt(&a, obs.values(), &nnls.density, "reference system");
    assert!(nnls.residual_norm >= lsq.residual_norm - 1e-12);

    // 50 random overdetermined systems.
    let mut rng = SplitMix64::new(0x20c4);
    for trial in 0..50 {
        let (a, _, f) = random_system(&mut rng, 20, 10);
        let nnls = solve_nnls(&a, &f, &NnlsOptions::default()).unwrap();
        let lsq = solve_lsq(&a, &f).unwrap();
        let label = format!("random 20x10 #{trial}");
        assert!(
            nnls.density.iter().all(|&v| v >= 0.0),
            "{label}: negative entry"
        );
        assert_kkt(&a, &f, &nnls.density, &label);
        assert!(
            nnls.residual_norm >= lsq.residual_norm - 1e-12,
            "{label}: undercuts the unconstrained residual"
        );
    }

    // Exhaustive cross-check over every support of tiny systems.
    for (n, seed) in [(2_usize, 0x2b2b_u64), (3, 0x3c3c)] {
        let mut rng = SplitMix64::new(seed);
        for trial in 0..100 {
            let (a, columns, f) = random_system(&mut rng, n, n);
            let nnls = solve_nnls(&a, &f, &NnlsOptions::default()).unwrap();
            let oracle = enumeration_residual(&columns, &f);
            assert!(
                (nnls.residual_norm - oracle).abs() <= 1e-10,
                "{n}x{n} #{trial}: solver residual {:.12e} vs enumerated optimum {oracle:.12e}",
                nnls.residual_norm
            );
        }
    }

    assert!(
        start.elapsed() < Duration::from_secs(60),
        "certificate run exceeded one minute"
    );
}

/// The noiseless fit at the centered unit window recovers the true total
/// source mass within 5%; the achieved deviation, measured once, is pinned
/// four orders tighter.
#[test]
fn criterion_3_recovered_mass_matches_the_true_mass() {
    let (_, obs) = reference_observations();
    let record = evaluate_window(&obs, &unit_window(100), &NnlsOptions::default()).unwrap();
    let deviation = (record.mass - TRUE_MASS).abs() / TRUE_MASS;
    assert!(
        deviation <= 0.05,
        "mass {:.8e} deviates {deviation:.3e} from the true {TRUE_MASS:.8e}",
        record.mass
    );
    // Measured deviation 4.9e-8; pinned with headroom.
    assert!(
        deviation <= 1e-6,
        "regression: deviation {deviation:.3e} exceeds the frozen bound 1e-6"
    );
}

/// Sliding the unit window across x0 in {-0.5, -0.25, 0, 0.25, 0.5} on
/// noiseless data must pin the fit to the containing positions: the
/// residual jumps by pinned factors once either disk center leaves the
/// window, and the centered position is expected to be the strict minimum.
#[test]
fn criterion_4_residual_orders_window_positions() {
    let (ellipse, obs) = reference_observations();
    let grid = vec![-0.5, -0.25, 0.0, 0.25, 0.5];
    let config = SweepConfig::new(1.0, 1.0, 50, 50, grid, 0.0);
    let report = sweep(&obs, &ellipse, &config).unwrap();
    let res: Vec<f64> = report.records.iter().map(|r| r.residual_norm).collect();

    // Measured once: res(-0.5)/res(0) = 3.9e2 and res(+0.5)/res(0) = 7.4e4.
    assert!(
        res[0] / res[2] >= 150.0,
        "residual factor {:.1} at x0 = -0.5 is below the pinned 150",
        res[0] / res[2]
    );
    assert!(
        res[4] / res[2] >= 25_000.0,
        "residual factor {:.1} at x0 = +0.5 is below the pinned 25000",
        res[4] / res[2]
    );

    let table: String = report
        .records
        .iter()
        .map(|r| format!("  x0 = {:+.2}: residual = {:.6e}\n", r.x0, r.residual_norm))
        .collect();
    assert!(
        report
            .records
            .iter()
            .all(|r| r.x0 == 0.0 || res[2] < r.residual_norm),
        "the centered residual must be the strict minimum, but measured\n{table}\
         A uniform disk acts on every exterior point exactly like a point mass at its \
         center, so any window whose interior contains both disk centers admits an \
         essentially exact nonnegative layer; the three containing positions all sit at \
         the solver floor near 1e-8 and their ordering is rounding noise (across eight \
         per-side segment counts the floor argmin never stabilized at 0). The decisive, \
         stable signal is the orders-of-magnitude jump once a center leaves the window, \
         asserted above."
    );
}

/// With 5% and 20% multiplicative boundary noise (frozen seed), the
/// residual plateau of the five-point sweep still contains the true center.
#[test]
fn criterion_5_noisy_plateau_contains_the_center() {
    let (ellipse, obs) = reference_observations();
    let grid = vec![-0.5, -0.25, 0.0, 0.25, 0.5];
    let config = SweepConfig::new(1.0, 1.0, 50, 50, grid, 0.0);
    for delta in [0.05, 0.2] {
        let noisy = perturb(obs.values(), &NoiseSpec::new(delta, 1234).unwrap()).unwrap();
        let report = sweep(&obs.with_values(noisy).unwrap(), &ellipse, &config).unwrap();
        assert!(
            report.plateau.contains(&0.0),
            "delta = {delta}: plateau {:?} misses the center",
            report.plateau
        );
    }
}

/// At the finest discretization the nonnegative fit must be free of sign
/// alternations; the unconstrained fit on the same exact data is expected
/// to oscillate.
#[test]
fn criterion_6_oscillation_diagnostic_separates_solvers() {
    let (a, obs) = reference_system(200);
    let nnls = solve_nnls(&a, obs.values(), &NnlsOptions::default()).unwrap();
    assert_eq!(nnls.sign_changes, 0, "nonnegative fit must not alternate");

    let lsq = solve_lsq(&a, obs.values()).unwrap();
    assert!(
        lsq.sign_changes > 0,
        "expected the unconstrained fit to oscillate on exact data, measured sign_changes \
         = {} with every entry positive and relative residual {:.1e}: the rank-truncated \
         minimum-norm solve projects consistent data onto the numerically stable spectral \
         range and returns a smooth positive layer at every tested size (up to the 800 \
         segments used here). Oscillation is a perturbation phenomenon on this system: at \
         5% boundary noise the same matrix measures 58 sign alternations with coefficient \
         norm near 2.8e10 while the nonnegative fit stays alternation-free (companion \
         behavior test in the library crate).",
        lsq.sign_changes,
        lsq.relative_residual
    );
}

/// Along the frozen ridge ladder on the 5%-noise system the coefficient
/// norm shrinks while the residual grows; every value is pinned to the
/// measurement that froze it.
#[test]
fn criterion_7_ridge_path_trades_norm_for_residual() {
    const ALPHAS: [f64; 5] = [1e-10, 1e-8, 1e-7, 1e-6, 1e-4];
    const NORMS: [f64; 5] = [8.8028, 1.0329, 0.53430, 0.23399, 0.14521];
    const RESIDUALS: [f64; 5] = [6.7517e-4, 7.0107e-4, 7.1839e-4, 7.6353e-4, 8.6243e-4];

    let (a, obs) = reference_system(50);
    let noisy = perturb(obs.values(), &NoiseSpec::new(0.05, 1234).unwrap()).unwrap();

    let mut norms = [0.0; 5];
    let mut prev_res = f64::NEG_INFINITY;
    for (k, &alpha) in ALPHAS.iter().enumerate() {
        let fit = solve_tikhonov(&a, &noisy, alpha).unwrap();
        norms[k] = norm2(&fit.density);
        assert!(
            (norms[k] - NORMS[k]).abs() <= 1e-3 * NORMS[k],
            "alpha = {alpha:.0e}: norm {:.6e} drifted from the frozen {:.6e}",
            norms[k],
            NORMS[k]
        );
        assert!(
            (fit.residual_norm - RESIDUALS[k]).abs() <= 1e-3 * RESIDUALS[k],
            "alpha = {alpha:.0e}: residual {:.6e} drifted from the frozen {:.6e}",
            fit.residual_norm,
            RESIDUALS[k]
        );
        assert!(
            fit.residual_norm >= prev_res,
            "alpha = {alpha:.0e}: residual decreased along the ladder"
        );
        prev_res = fit.residual_norm;
    }
    assert!(
        norms[3] < norms[2],
        "the norm at alpha = 1e-6 must undercut the norm at alpha = 1e-7"
    );
}

/// The discrepancy search hits the target residual to relative 1e-3 and
/// lands inside the cell where a dense parameter grid brackets the target.
#[test]
fn criterion_8_discrepancy_alpha_hits_the_target_residual() {
    let (a, obs) = reference_system(50);
    let noisy = perturb(obs.values(), &NoiseSpec::new(0.05, 1234).unwrap()).unwrap();
    // Noise estimate: delta * sample std of the perturbed data * sqrt(count).
    let level = 0.05 * sample_std_dev(&noisy) * (noisy.len() as f64).sqrt();
    let target = level; // tau = 1

    let selection = choose_alpha_discrepancy(&a, &noisy, level, 1.0).unwrap();
    assert_eq!(selection.status, DiscrepancyStatus::Converged);
    let deviation = (selection.residual_norm - target).abs() / target;
    assert!(
        deviation <= 1e-3,
        "residual {:.6e} misses the target {target:.6e} (relative {deviation:.3e})",
        selection.residual_norm
    );
    // Measured once: alpha* = 8.7379e-7.
    assert!(
        (selection.alpha - 8.737883e-7).abs() <= 1e-3 * 8.737883e-7,
        "alpha {:.6e} drifted from the frozen selection",
        selection.alpha
    );

    // Dense-grid oracle: 201 log-spaced parameters across the search
    // bracket [1e-16, 1e4]. The residual is monotone in alpha, so the first
    // straddling cell must contain the selected alpha.
    let mut bracket = None;
    let mut prev_alpha = 1e-16;
    let mut prev_res = solve_tikhonov(&a, &noisy, prev_alpha)
        .unwrap()
        .residual_norm;
    assert!(prev_res < target, "the grid must start below the target");
    for k in 1..=200_i32 {
        let alpha = 10_f64.powf(-16.0 + 0.1 * f64::from(k));
        let res = solve_tikhonov(&a, &noisy, alpha).unwrap().residual_norm;
        if res >= target {
            bracket = Some((prev_alpha, alpha));
            break;
        }
        prev_alpha = alpha;
        prev_res = res;
    }
    let _ = prev_res;
    let (lo, hi) = bracket.expect("the dense grid must straddle the target residual");
    assert!(
        selection.alpha >= lo && selection.alpha <= hi,
        "selected alpha {:.6e} lies outside the grid crossing cell [{lo:.6e}, {hi:.6e}]",
        selection.alpha
    );
}

/// Each subcommand, on both bundled configurations, writes byte-identical
/// files across two runs.
#[test]
fn criterion_9_cli_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let examples = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    for config in ["paper.json", "paper_noisy.json"] {
        let config_path = examples.join(config);
        for subcommand in ["forward", "solve", "sweep"] {
            let mut outputs = Vec::new();
            for run in 0..2 {
                let out = dir.path().join(format!("{subcommand}-{run}-{config}.csv"));
                let result = Command::new(env!("CARGO_BIN_EXE_potloc"))
                    .arg(subcommand)
                    .arg("--config")
                    .arg(&config_path)
                    .arg("--out")
                    .arg(&out)
                    .output()
                    .unwrap();
                assert!(
                    result.status.success(),
                    "{config} {subcommand}: {}",
                    String::from_utf8_lossy(&result.stderr)
                );
                outputs.push(std::fs::read(&out).unwrap());
            }
            assert!(
                !outputs[0].is_empty(),
                "{config} {subcommand}: empty output"
            );
            assert!(
                outputs[0] == outputs[1],
                "{config} {subcommand}: the two runs differ"
            );
        }
    }
}
