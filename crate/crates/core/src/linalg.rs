//! Small dense linear algebra: partial-pivoting solves, Cholesky factors and
//! the largest eigenvalue of a symmetric matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Largest system accepted by [`solve_linear_system`].
pub const MAX_SOLVE_DIM: usize = 64;

/// Relative pivot threshold: a pivot is treated as zero when its magnitude is
/// at most this times the largest row norm of the input.
pub const SINGULARITY_TOL: f64 = 1e-12;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, actual: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Fails with [`Error::Singular`] naming the zero-based elimination step whose
/// best pivot is below `SINGULARITY_TOL` times the largest row norm of `A`.
pub fn solve_linear_system(a: &SquareMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("empty linear system".into()));
    }
    if n > MAX_SOLVE_DIM {
        return Err(Error::InvalidParameter(alloc::format!(
            "linear system of dimension {n} exceeds the supported maximum {MAX_SOLVE_DIM}"
        )));
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: b.len() });
    }

    let scale = (0..n)
        .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let tol = SINGULARITY_TOL * scale;

    let mut m = a.data.clone();
    let mut rhs = b.to_vec();

    for step in 0..n {
        let (pivot_row, pivot_abs) = (step..n)
            .map(|r| (r, m[r * n + step].abs()))
            .fold((step, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot_abs > tol) {
            return Err(Error::Singular { step });
        }
        if pivot_row != step {
            for c in 0..n {
                m.swap(step * n + c, pivot_row * n + c);
            }
            rhs.swap(step, pivot_row);
        }
        let pivot = m[step * n + step];
        for r in step + 1..n {
            let factor = m[r * n + step] / pivot;
            if factor == 0.0 {
                continue;
            }
            m[r * n + step] = 0.0;
            for c in step + 1..n {
                m[r * n + c] -= factor * m[step * n + c];
            }
            rhs[r] -= factor * rhs[step];
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let tail: f64 = (i + 1..n).map(|c| m[i * n + c] * x[c]).sum();
        x[i] = (rhs[i] - tail) / m[i * n + i];
    }
    Ok(x)
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`, stored row-major with
/// zeros above the diagonal.
pub fn cholesky(a: &SquareMatrix) -> Result<SquareMatrix> {
    let n = a.dim();
    let mut l = SquareMatrix::zeros(n);
    for j in 0..n {
        let mut diag = a.get(j, j);
        for k in 0..j {
            let v = l.get(j, k);
            diag -= v * v;
        }
        if !(diag > 0.0) {
            return Err(Error::NotPositiveDefinite { column: j });
        }
        let d = math::sqrt(diag);
        l.set(j, j, d);
        for i in j + 1..n {
            let mut s = a.get(i, j);
            let (ri, rj) = (l.row(i), l.row(j));
            for k in 0..j {
                s -= ri[k] * rj[k];
            }
            l.set(i, j, s / d);
        }
    }
    Ok(l)
}

/// Largest eigenvalue of a symmetric matrix.
///
/// Householder reduction to tridiagonal form followed by Sturm-sequence
/// bisection; only the lower triangle of `a` is read.
pub fn largest_symmetric_eigenvalue(a: &SquareMatrix) -> f64 {
    let n = a.dim();
    if n == 0 {
        return 0.0;
    }
    let (diag, off) = tridiagonalize(a);

    // Gershgorin interval for the tridiagonal matrix.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    if lo == hi {
        return hi;
    }

    // count(x) = number of eigenvalues strictly below x.
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = 1.0_f64;
        for i in 0..n {
            let e2 = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
            q = diag[i] - x - if i > 0 { e2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };

    // Largest eigenvalue: smallest x with count_below(x) == n.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Householder tridiagonalization; returns (diagonal, sub-diagonal).
fn tridiagonalize(a: &SquareMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut m: Vec<f64> = a.as_slice().to_vec();
    // Symmetrize from the lower triangle.
    for i in 0..n {
        for j in 0..i {
            m[j * n + i] = m[i * n + j];
        }
    }
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        // Column k below the diagonal.
        let alpha_sq: f64 = (k + 1..n).map(|i| m[i * n + k] * m[i * n + k]).sum();
        let alpha_norm = math::sqrt(alpha_sq);
        if alpha_norm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let x0 = m[(k + 1) * n + k];
        let alpha = if x0 > 0.0 { -alpha_norm } else { alpha_norm };
        off[k] = alpha;

        for i in 0..n {
            v[i] = 0.0;
        }
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = m[i * n + k];
        }
        let vnorm_sq: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;

        // w = beta * A v on the trailing block, then w -= (beta/2)(vᵀw) v.
        for i in k + 1..n {
            let row = &m[i * n..(i + 1) * n];
            w[i] = beta * (k + 1..n).map(|j| row[j] * v[j]).sum::<f64>();
        }
        let vw: f64 = (k + 1..n).map(|i| v[i] * w[i]).sum();
        let c = 0.5 * beta * vw;
        for i in k + 1..n {
            w[i] -= c * v[i];
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i * n + j] -= v[i] * w[j] + w[i] * v[j];
            }
        }
        for i in k + 2..n {
            m[i * n + k] = 0.0;
            m[k * n + i] = 0.0;
        }
        m[(k + 1) * n + k] = alpha;
        m[k * n + k + 1] = alpha;
    }
    if n >= 2 {
        off[n - 2] = m[(n - 1) * n + n - 2];
    }
    let diag = (0..n).map(|i| m[i * n + i]).collect();
    (diag, off)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual_inf(a: &SquareMatrix, x: &[f64], b: &[f64]) -> f64 {
        a.mul_vec(x).iter().zip(b).map(|(l, r)| (l - r).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_system() {
        let x = solve_linear_system(&SquareMatrix::identity(3), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn ar1_two_by_two_system() {
        let a = SquareMatrix::from_rows(&[[1.0, 0.0625], [0.25, 0.25]]).unwrap();
        let x = solve_linear_system(&a, &[0.0, 3.0]).unwrap();
        assert!((x[0] + 0.8).abs() < 1e-12);
        assert!((x[1] - 12.8).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_is_singular_at_first_step() {
        let a = SquareMatrix::zeros(2);
        assert_eq!(solve_linear_system(&a, &[1.0, 1.0]), Err(Error::Singular { step: 0 }));
    }

    #[test]
    fn rank_deficient_reports_later_step() {
        let a = SquareMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert_eq!(solve_linear_system(&a, &[1.0, 1.0]), Err(Error::Singular { step: 1 }));
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = SquareMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let x = solve_linear_system(&a, &[2.0, 5.0]).unwrap();
        assert_eq!(x, vec![5.0, 2.0]);
    }

    #[test]
    fn rejects_oversized_and_mismatched() {
        assert!(solve_linear_system(&SquareMatrix::identity(65), &[0.0; 65]).is_err());
        assert_eq!(
            solve_linear_system(&SquareMatrix::identity(2), &[0.0; 3]),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        );
    }

    #[test]
    fn residual_bound_on_hilbert_like_system() {
        let a = SquareMatrix::from_fn(6, |i, j| 1.0 / (1.0 + i as f64 + j as f64) + if i == j { 1.0 } else { 0.0 });
        let b = [1.0, -2.0, 3.0, 0.5, 0.0, 7.0];
        let x = solve_linear_system(&a, &b).unwrap();
        assert!(residual_inf(&a, &x, &b) <= 1e-10 * (1.0 + 7.0));
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = SquareMatrix::from_fn(5, |i, j| 0.3_f64.powi((i as i32 - j as i32).abs()));
        let l = cholesky(&a).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let s: f64 = (0..5).map(|k| l.get(i, k) * l.get(j, k)).sum();
                assert!((s - a.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = SquareMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert_eq!(cholesky(&a), Err(Error::NotPositiveDefinite { column: 1 }));
    }

    #[test]
    fn eigenvalue_of_diagonal_and_small_cases() {
        let mut d = SquareMatrix::zeros(4);
        for (i, v) in [3.0, -1.0, 7.5, 2.0].into_iter().enumerate() {
            d.set(i, i, v);
        }
        assert!((largest_symmetric_eigenvalue(&d) - 7.5).abs() < 1e-12);
        let one = SquareMatrix::from_rows(&[[4.0]]).unwrap();
        assert_eq!(largest_symmetric_eigenvalue(&one), 4.0);
        let two = SquareMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        assert!((largest_symmetric_eigenvalue(&two) - 3.0).abs() < 1e-12);
    }
}
