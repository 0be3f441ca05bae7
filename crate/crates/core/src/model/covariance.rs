use alloc::format;
use alloc::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, largest_symmetric_eigenvalue, SquareMatrix};
use crate::math;

/// Largest dimension accepted for an explicit correlation matrix.
pub const MAX_DENSE_DIM: usize = 4096;

const DENSE_SYMMETRY_TOL: f64 = 1e-12;

/// A validated explicit correlation matrix together with its Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCorrelation {
    matrix: SquareMatrix,
    factor: SquareMatrix,
}

impl DenseCorrelation {
    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    /// Lower-triangular `L` with `L Lᵀ = R`.
    pub fn factor(&self) -> &SquareMatrix {
        &self.factor
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CovarianceKind {
    /// `R[i][j] = rho^|i-j|`.
    Ar1 { rho: f64 },
    /// `R[i][j] = rho` off the diagonal, 1 on it.
    Equicorrelated { rho: f64 },
    Identity,
    Dense(Arc<DenseCorrelation>),
}

/// Correlation matrix `R` of the predictor vector, stored symbolically.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceStructure {
    kind: CovarianceKind,
    p: usize,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("correlation parameter must lie in (0, 1), got {rho}")))
    }
}

fn check_p(p: usize) -> Result<()> {
    if p == 0 {
        Err(Error::InvalidParameter("dimension p must be positive".into()))
    } else {
        Ok(())
    }
}

impl CovarianceStructure {
    pub fn ar1(rho: f64, p: usize) -> Result<Self> {
        check_rho(rho)?;
        check_p(p)?;
        Ok(Self { kind: CovarianceKind::Ar1 { rho }, p })
    }

    pub fn equicorrelated(rho: f64, p: usize) -> Result<Self> {
        check_rho(rho)?;
        check_p(p)?;
        Ok(Self { kind: CovarianceKind::Equicorrelated { rho }, p })
    }

    pub fn identity(p: usize) -> Result<Self> {
        check_p(p)?;
        Ok(Self { kind: CovarianceKind::Identity, p })
    }

    /// Validates symmetry, unit diagonal and positive definiteness.
    pub fn dense(matrix: SquareMatrix) -> Result<Self> {
        let p = matrix.dim();
        check_p(p)?;
        if p > MAX_DENSE_DIM {
            return Err(Error::InvalidParameter(format!(
                "explicit correlation matrices are limited to p <= {MAX_DENSE_DIM}, got {p}"
            )));
        }
        if !matrix.as_slice().iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("correlation matrix has non-finite entries".into()));
        }
        if !matrix.is_symmetric(DENSE_SYMMETRY_TOL) {
            return Err(Error::InvalidParameter("correlation matrix is not symmetric".into()));
        }
        if let Some(i) = (0..p).find(|&i| matrix.get(i, i) != 1.0) {
            return Err(Error::InvalidParameter(format!(
                "correlation matrix diagonal entry {i} is {} (expected 1)",
                matrix.get(i, i)
            )));
        }
        let factor = cholesky(&matrix)?;
        Ok(Self { kind: CovarianceKind::Dense(Arc::new(DenseCorrelation { matrix, factor })), p })
    }

    /// Same structure at a different dimension. Explicit matrices cannot be
    /// resized.
    pub fn with_dimension(&self, p: usize) -> Result<Self> {
        check_p(p)?;
        match &self.kind {
            CovarianceKind::Dense(_) if p != self.p => Err(Error::InvalidParameter(format!(
                "explicit correlation matrix has fixed dimension {}, cannot resize to {p}",
                self.p
            ))),
            kind => Ok(Self { kind: kind.clone(), p }),
        }
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn kind(&self) -> &CovarianceKind {
        &self.kind
    }

    /// Entry without bounds checking beyond debug assertions.
    #[inline]
    pub(crate) fn entry_unchecked(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.p && j < self.p);
        if i == j {
            return 1.0;
        }
        match &self.kind {
            CovarianceKind::Ar1 { rho } => {
                let lag = i.abs_diff(j);
                if lag > i32::MAX as usize {
                    0.0
                } else {
                    math::powi(*rho, lag as i32)
                }
            }
            CovarianceKind::Equicorrelated { rho } => *rho,
            CovarianceKind::Identity => 0.0,
            CovarianceKind::Dense(d) => d.matrix.get(i, j),
        }
    }

    /// Materializes `R`. Intended for small oracle computations only.
    pub fn to_dense(&self) -> SquareMatrix {
        match &self.kind {
            CovarianceKind::Dense(d) => d.matrix.clone(),
            _ => SquareMatrix::from_fn(self.p, |i, j| self.entry_unchecked(i, j)),
        }
    }
}

/// Entry `(i, j)` of `R` (zero-based).
pub fn covariance_entry(structure: &CovarianceStructure, i: usize, j: usize) -> Result<f64> {
    let dim = structure.p();
    for index in [i, j] {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
    }
    Ok(structure.entry_unchecked(i, j))
}

/// Largest eigenvalue of `R`, or an analytic upper bound for AR(1).
///
/// * equicorrelation: exactly `1 + (p - 1) rho`
/// * AR(1): `(1 + rho) / (1 - rho)`, the supremum of the spectral density,
///   which bounds the largest eigenvalue for every `p`
/// * identity: 1
/// * explicit: computed numerically
pub fn spectral_bound(structure: &CovarianceStructure) -> f64 {
    let p = structure.p() as f64;
    match structure.kind() {
        CovarianceKind::Equicorrelated { rho } => 1.0 + (p - 1.0) * rho,
        CovarianceKind::Ar1 { rho } => (1.0 + rho) / (1.0 - rho),
        CovarianceKind::Identity => 1.0,
        CovarianceKind::Dense(d) => largest_symmetric_eigenvalue(&d.matrix),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_rules() {
        let ar = CovarianceStructure::ar1(0.25, 5).unwrap();
        assert_eq!(covariance_entry(&ar, 0, 2).unwrap(), 0.0625);
        assert_eq!(covariance_entry(&ar, 2, 0).unwrap(), 0.0625);
        let eq = CovarianceStructure::equicorrelated(0.1, 10).unwrap();
        assert_eq!(covariance_entry(&eq, 1, 1).unwrap(), 1.0);
        assert_eq!(covariance_entry(&eq, 1, 6).unwrap(), 0.1);
        let id = CovarianceStructure::identity(3).unwrap();
        assert_eq!(covariance_entry(&id, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn entry_out_of_range() {
        let eq = CovarianceStructure::equicorrelated(0.1, 10).unwrap();
        assert_eq!(covariance_entry(&eq, 10, 0), Err(Error::IndexOutOfRange { index: 10, dim: 10 }));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CovarianceStructure::ar1(0.0, 3).is_err());
        assert!(CovarianceStructure::ar1(1.0, 3).is_err());
        assert!(CovarianceStructure::equicorrelated(f64::NAN, 3).is_err());
        assert!(CovarianceStructure::identity(0).is_err());
    }

    #[test]
    fn dense_validation() {
        let bad_diag = SquareMatrix::from_rows(&[[2.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(CovarianceStructure::dense(bad_diag).is_err());
        let asym = SquareMatrix::from_rows(&[[1.0, 0.2], [0.3, 1.0]]).unwrap();
        assert!(CovarianceStructure::dense(asym).is_err());
        let indefinite = SquareMatrix::from_rows(&[[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]]).unwrap();
        assert!(matches!(
            CovarianceStructure::dense(indefinite),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let ok = SquareMatrix::from_rows(&[[1.0, 0.5], [0.5, 1.0]]).unwrap();
        let s = CovarianceStructure::dense(ok).unwrap();
        assert!((spectral_bound(&s) - 1.5).abs() < 1e-12);
        assert!(s.with_dimension(3).is_err());
        assert!(s.with_dimension(2).is_ok());
    }

    #[test]
    fn spectral_bounds() {
        let eq = CovarianceStructure::equicorrelated(0.1, 100).unwrap();
        assert!((spectral_bound(&eq) - 10.9).abs() < 1e-12);
        assert_eq!(spectral_bound(&CovarianceStructure::identity(50).unwrap()), 1.0);
        let ar = CovarianceStructure::ar1(0.25, 10).unwrap();
        assert!((spectral_bound(&ar) - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn huge_lags_underflow_to_zero() {
        let ar = CovarianceStructure::ar1(0.5, 5_000_000).unwrap();
        assert_eq!(covariance_entry(&ar, 0, 4_999_999).unwrap(), 0.0);
    }
}
