//! Coefficient choices that hide important predictors from marginal screening.

use alloc::format;

use super::covariance::CovarianceStructure;
use super::regression::RegressionModel;
use crate::error::{Error, Result};
use crate::linalg::{solve_linear_system, SquareMatrix};

/// Non-zero coefficients on predictors 0 and 2 of an AR(1) design chosen so
/// that `Cov(y, x_0) = 0` while `Cov(y, x_1) = a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Construction {
    pub rho: f64,
    pub beta1: f64,
    pub beta3: f64,
}

impl Ar1Construction {
    /// The regression model over `p >= 3` AR(1) predictors.
    pub fn model(&self, p: usize, noise_sd: f64) -> Result<RegressionModel> {
        if p < 3 {
            return Err(Error::InvalidParameter(format!("AR(1) construction needs p >= 3, got {p}")));
        }
        RegressionModel::new(
            0.0,
            [(0, self.beta1), (2, self.beta3)],
            noise_sd,
            CovarianceStructure::ar1(self.rho, p)?,
        )
    }
}

/// Solves `[[1, ρ²], [ρ, ρ]] (β1, β3)ᵀ = (0, a)ᵀ`.
pub fn solve_ar1_beta(rho: f64, a: f64) -> Result<Ar1Construction> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("rho must lie in (0, 1), got {rho}")));
    }
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "target covariance a must be finite and non-zero, got {a}"
        )));
    }
    let system = SquareMatrix::from_rows(&[[1.0, rho * rho], [rho, rho]])?;
    let beta = solve_linear_system(&system, &[0.0, a])?;
    Ok(Ar1Construction { rho, beta1: beta[0], beta3: beta[1] })
}

/// Coefficients on predictors 0..5 of an equicorrelated design chosen so that
/// predictors 0..4 have covariance `important_cov` with `y` while every
/// predictor past index 4 has covariance `unimportant_cov`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquiConstruction {
    pub rho: f64,
    pub beta: [f64; 5],
    pub important_cov: f64,
    pub unimportant_cov: f64,
}

impl EquiConstruction {
    /// The regression model over `p >= 6` equicorrelated predictors.
    pub fn model(&self, p: usize, noise_sd: f64) -> Result<RegressionModel> {
        if p < 6 {
            return Err(Error::InvalidParameter(format!(
                "equicorrelation construction needs p >= 6, got {p}"
            )));
        }
        RegressionModel::new(
            0.0,
            self.beta.iter().copied().enumerate(),
            noise_sd,
            CovarianceStructure::equicorrelated(self.rho, p)?,
        )
    }
}

/// Solves the 5×5 system whose first four rows are rows of the
/// equicorrelation matrix and whose last row is all `ρ`, against the right
/// side `(c, c, c, c, d)` with `c = important_cov`, `d = unimportant_cov`.
pub fn solve_equi_beta(rho: f64, important_cov: f64, unimportant_cov: f64) -> Result<EquiConstruction> {
    if !(rho.is_finite() && rho < 1.0 && rho >= 0.0) {
        return Err(Error::InvalidParameter(format!("rho must lie in [0, 1), got {rho}")));
    }
    if !(important_cov.is_finite() && unimportant_cov.is_finite()) {
        return Err(Error::InvalidParameter("target covariances must be finite".into()));
    }
    let system = SquareMatrix::from_fn(5, |i, j| if i == j && i < 4 { 1.0 } else { rho });
    let rhs = [important_cov, important_cov, important_cov, important_cov, unimportant_cov];
    let solved = solve_linear_system(&system, &rhs)?;
    // rho == 0 is singular and was rejected by the solver above.
    let mut beta = [0.0; 5];
    beta.copy_from_slice(&solved);
    if beta.iter().any(|&b| b == 0.0) {
        return Err(Error::InvalidParameter(format!(
            "targets ({important_cov}, {unimportant_cov}) give a zero coefficient"
        )));
    }
    Ok(EquiConstruction { rho, beta, important_cov, unimportant_cov })
}
