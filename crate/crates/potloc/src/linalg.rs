//! Minimal dense linear algebra: matrices, matrix-vector products, and
//! orthogonal-factorization least squares.
//!
//! The least-squares path is a column-pivoted Householder QR. When the
//! numerical rank is below the column count, a second orthogonal
//! factorization of the leading block yields the minimum-norm minimizer,
//! so rank-deficient and underdetermined systems are handled uniformly.
//! Everything is sequential and allocation-order stable, so repeated calls
//! on identical inputs are bitwise reproducible.

use crate::error::{Error, Result};
use crate::scalar::{real_usize, Real};

/// Dense row-major matrix with at least one row and one column.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    /// Wraps a row-major buffer; every entry must be finite.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Invalid {
                what: "DenseMatrix",
                reason: "rows and cols must be at least 1".into(),
            });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "DenseMatrix::from_vec",
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::Invalid {
                what: "DenseMatrix",
                reason: "entries must be finite".into(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Invalid {
                what: "DenseMatrix",
                reason: "rows must be nonempty".into(),
            });
        }
        let cols = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "DenseMatrix::from_rows",
                    expected: cols,
                    actual: r.len(),
                });
            }
            let _ = i;
        }
        let data: Vec<T> = rows.iter().flatten().copied().collect();
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        debug_assert!(rows > 0 && cols > 0);
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        debug_assert!(i < self.rows);
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// y = A x.
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                expected: self.cols,
                actual: x.len(),
            });
        }
        let mut y = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = T::zero();
            for j in 0..self.cols {
                acc = acc + row[j] * x[j];
            }
            y.push(acc);
        }
        Ok(y)
    }

    /// w = Aᵀ y.
    pub fn transpose_matvec(&self, y: &[T]) -> Result<Vec<T>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "transpose_matvec",
                expected: self.rows,
                actual: y.len(),
            });
        }
        let mut w = vec![T::zero(); self.cols];
        for (i, &yi) in y.iter().enumerate() {
            let row = self.row(i);
            for j in 0..self.cols {
                w[j] = w[j] + row[j] * yi;
            }
        }
        Ok(w)
    }

    /// Copy of the selected columns, in the order given.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Invalid {
                what: "column selection",
                reason: "at least one column index required".into(),
            });
        }
        if let Some(&bad) = indices.iter().find(|&&j| j >= self.cols) {
            return Err(Error::Invalid {
                what: "column selection",
                reason: format!("column index {bad} out of range for {} columns", self.cols),
            });
        }
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for i in 0..self.rows {
            let row = self.row(i);
            for &j in indices {
                data.push(row[j]);
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: indices.len(),
            data,
        })
    }
}

/// Euclidean norm of a vector.
pub fn norm2<T: Real>(v: &[T]) -> T {
    let mut acc = T::zero();
    for &x in v {
        acc = acc + x * x;
    }
    acc.sqrt()
}

/// Largest absolute entry; zero for an empty slice.
pub(crate) fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

// Householder QR working storage. Reflector vectors live below the diagonal
// of `w` (with their leading component on the diagonal slot); the triangular
// factor occupies the strict upper part of `w` plus `r_diag`.
struct QrFactors<T> {
    m: usize,
    n: usize,
    w: Vec<T>,
    beta: Vec<T>,
    r_diag: Vec<T>,
}

fn trailing_col_norm<T: Real>(w: &[T], n: usize, m: usize, col: usize, from_row: usize) -> T {
    let mut acc = T::zero();
    for i in from_row..m {
        let v = w[i * n + col];
        acc = acc + v * v;
    }
    acc.sqrt()
}

// Builds the reflector annihilating w[k+1.., k] in place; returns (beta, R[k,k]).
fn householder_step<T: Real>(w: &mut [T], n: usize, m: usize, k: usize) -> (T, T) {
    let norm = trailing_col_norm(w, n, m, k, k);
    if norm == T::zero() {
        return (T::zero(), T::zero());
    }
    let x0 = w[k * n + k];
    let sign = if x0 >= T::zero() { T::one() } else { -T::one() };
    w[k * n + k] = x0 + sign * norm;
    let mut vtv = T::zero();
    for i in k..m {
        let v = w[i * n + k];
        vtv = vtv + v * v;
    }
    ((T::one() + T::one()) / vtv, -sign * norm)
}

fn apply_reflector_to_col<T: Real>(w: &mut [T], n: usize, m: usize, k: usize, beta: T, j: usize) {
    let mut s = T::zero();
    for i in k..m {
        s = s + w[i * n + k] * w[i * n + j];
    }
    s = s * beta;
    for i in k..m {
        w[i * n + j] = w[i * n + j] - s * w[i * n + k];
    }
}

// Unpivoted Householder QR of an m x n buffer.
fn factor_qr<T: Real>(mut w: Vec<T>, m: usize, n: usize) -> QrFactors<T> {
    let kmax = m.min(n);
    let mut beta = vec![T::zero(); kmax];
    let mut r_diag = vec![T::zero(); kmax];
    for k in 0..kmax {
        let (bk, rkk) = householder_step(&mut w, n, m, k);
        beta[k] = bk;
        r_diag[k] = rkk;
        if bk != T::zero() {
            for j in (k + 1)..n {
                apply_reflector_to_col(&mut w, n, m, k, bk, j);
            }
        }
    }
    QrFactors {
        m,
        n,
        w,
        beta,
        r_diag,
    }
}

struct PivotedQr<T> {
    f: QrFactors<T>,
    perm: Vec<usize>,
    rank: usize,
}

// Column-pivoted Householder QR with numerical rank detection. The pivot at
// each step is the trailing column of largest norm (recomputed, ties to the
// smaller index); the rank threshold is max(m, n) * machine epsilon * the
// largest column norm of the input.
fn factor_pivoted_qr<T: Real>(a: &DenseMatrix<T>) -> PivotedQr<T> {
    let (m, n) = (a.rows, a.cols);
    let mut w = a.data.clone();
    let kmax = m.min(n);
    let mut beta = vec![T::zero(); kmax];
    let mut r_diag = vec![T::zero(); kmax];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut norm_a = T::zero();

    for k in 0..kmax {
        let mut best_j = k;
        let mut best = trailing_col_norm(&w, n, m, k, k);
        for j in (k + 1)..n {
            let s = trailing_col_norm(&w, n, m, j, k);
            if s > best {
                best = s;
                best_j = j;
            }
        }
        if k == 0 {
            norm_a = best;
        }
        if best == T::zero() {
            break;
        }
        if best_j != k {
            for i in 0..m {
                w.swap(i * n + k, i * n + best_j);
            }
            perm.swap(k, best_j);
        }
        let (bk, rkk) = householder_step(&mut w, n, m, k);
        beta[k] = bk;
        r_diag[k] = rkk;
        if bk != T::zero() {
            for j in (k + 1)..n {
                apply_reflector_to_col(&mut w, n, m, k, bk, j);
            }
        }
    }

    let tau = real_usize::<T>(m.max(n)) * T::epsilon() * norm_a;
    let rank = r_diag
        .iter()
        .take(kmax)
        .position(|rd| rd.abs() <= tau)
        .unwrap_or(kmax);
    PivotedQr {
        f: QrFactors {
            m,
            n,
            w,
            beta,
            r_diag,
        },
        perm,
        rank,
    }
}

fn apply_qt<T: Real>(f: &QrFactors<T>, b: &mut [T]) {
    let n = f.n;
    for k in 0..f.beta.len() {
        let bk = f.beta[k];
        if bk == T::zero() {
            continue;
        }
        let mut s = T::zero();
        for (i, &bi) in b.iter().enumerate().take(f.m).skip(k) {
            s = s + f.w[i * n + k] * bi;
        }
        s = s * bk;
        for (i, bi) in b.iter_mut().enumerate().take(f.m).skip(k) {
            *bi = *bi - s * f.w[i * n + k];
        }
    }
}

fn apply_q<T: Real>(f: &QrFactors<T>, b: &mut [T]) {
    let n = f.n;
    for k in (0..f.beta.len()).rev() {
        let bk = f.beta[k];
        if bk == T::zero() {
            continue;
        }
        let mut s = T::zero();
        for (i, &bi) in b.iter().enumerate().take(f.m).skip(k) {
            s = s + f.w[i * n + k] * bi;
        }
        s = s * bk;
        for (i, bi) in b.iter_mut().enumerate().take(f.m).skip(k) {
            *bi = *bi - s * f.w[i * n + k];
        }
    }
}

// Minimum-norm least-squares solve from a pivoted factorization.
fn solve_min_norm<T: Real>(p: &PivotedQr<T>, b: &[T]) -> Vec<T> {
    let n = p.f.n;
    let r = p.rank;
    let mut qtb = b.to_vec();
    apply_qt(&p.f, &mut qtb);

    let mut w_perm = vec![T::zero(); n];
    if r > 0 {
        if r == n {
            // Full column rank: plain back substitution with R.
            for i in (0..n).rev() {
                let mut s = qtb[i];
                for (j, &wj) in w_perm.iter().enumerate().take(n).skip(i + 1) {
                    s = s - p.f.w[i * n + j] * wj;
                }
                w_perm[i] = s / p.f.r_diag[i];
            }
        } else {
            // Rank-deficient or wide: the leading r rows of R form a full
            // row-rank system. QR-factor its transpose, forward-solve the
            // triangular factor, and map back; this yields the minimum-norm
            // solution of R_eff w = qtb[0..r].
            let mut bt = vec![T::zero(); n * r];
            for i in 0..r {
                bt[i * r + i] = p.f.r_diag[i];
                for j in (i + 1)..n {
                    bt[j * r + i] = p.f.w[i * n + j];
                }
            }
            let f2 = factor_qr(bt, n, r);
            let mut z = vec![T::zero(); r];
            for i in 0..r {
                let mut s = qtb[i];
                for (j, &zj) in z.iter().enumerate().take(i) {
                    s = s - f2.w[j * r + i] * zj;
                }
                z[i] = s / f2.r_diag[i];
            }
            w_perm[..r].copy_from_slice(&z);
            apply_q(&f2, &mut w_perm);
        }
    }

    let mut x = vec![T::zero(); n];
    for j in 0..n {
        x[p.perm[j]] = w_perm[j];
    }
    x
}

fn check_rhs<T: Real>(a: &DenseMatrix<T>, b: &[T], context: &'static str) -> Result<()> {
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch {
            context,
            expected: a.rows,
            actual: b.len(),
        });
    }
    if !b.iter().all(|x| x.is_finite()) {
        return Err(Error::Invalid {
            what: "right-hand side",
            reason: "entries must be finite".into(),
        });
    }
    Ok(())
}

/// Least-squares solve: returns the `v` minimizing `|| A v - b ||`.
///
/// For rank-deficient or underdetermined systems the minimum-norm minimizer
/// is returned. Numerical rank comes from a column-pivoted Householder QR
/// with threshold `max(rows, cols) * eps * ||A||` (largest column norm).
pub fn least_squares<T: Real>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    check_rhs(a, b, "least_squares")?;
    let p = factor_pivoted_qr(a);
    Ok(solve_min_norm(&p, b))
}

/// Ridge-regularized solve: minimizes `|| A v - b ||^2 + alpha * || v ||^2`.
///
/// Computed from the augmented least-squares stack of `A` over `sqrt(alpha)`
/// times the identity; the normal equations are never formed, so the
/// conditioning of `A` is not squared. `alpha = 0` delegates to
/// [`least_squares`].
pub fn tikhonov_solve<T: Real>(a: &DenseMatrix<T>, b: &[T], alpha: T) -> Result<Vec<T>> {
    if !(alpha.is_finite() && alpha >= T::zero()) {
        return Err(Error::Invalid {
            what: "alpha",
            reason: "regularization parameter must be finite and nonnegative".into(),
        });
    }
    check_rhs(a, b, "tikhonov_solve")?;
    if alpha == T::zero() {
        return least_squares(a, b);
    }
    let (m, n) = (a.rows, a.cols);
    let sqrt_alpha = alpha.sqrt();
    let mut data = vec![T::zero(); (m + n) * n];
    data[..m * n].copy_from_slice(&a.data);
    for j in 0..n {
        data[(m + j) * n + j] = sqrt_alpha;
    }
    let aug = DenseMatrix {
        rows: m + n,
        cols: n,
        data,
    };
    let mut rhs = vec![T::zero(); m + n];
    rhs[..m].copy_from_slice(b);
    let p = factor_pivoted_qr(&aug);
    Ok(solve_min_norm(&p, &rhs))
}
