use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::covariance::CovarianceStructure;
use crate::error::{Error, Result};
use crate::math;

/// `y = intercept + Σ β_i x_i + σ ε` with `x ~ N(0, R)` and `ε ~ N(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel {
    intercept: f64,
    /// Non-zero coefficients sorted by index.
    coefficients: Vec<(usize, f64)>,
    noise_sd: f64,
    covariance: CovarianceStructure,
}

impl RegressionModel {
    /// Builds a model from its sparse coefficients.
    ///
    /// Indices must be distinct and below `covariance.p()`; explicit zero
    /// coefficients are rejected. `noise_sd` may be zero (noiseless response).
    pub fn new(
        intercept: f64,
        coefficients: impl IntoIterator<Item = (usize, f64)>,
        noise_sd: f64,
        covariance: CovarianceStructure,
    ) -> Result<Self> {
        if !intercept.is_finite() {
            return Err(Error::InvalidParameter(format!("intercept must be finite, got {intercept}")));
        }
        if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise standard deviation must be finite and non-negative, got {noise_sd}"
            )));
        }
        let p = covariance.p();
        let mut coefficients: Vec<(usize, f64)> = coefficients.into_iter().collect();
        coefficients.sort_by_key(|&(i, _)| i);
        for (pos, &(index, value)) in coefficients.iter().enumerate() {
            if index >= p {
                return Err(Error::IndexOutOfRange { index, dim: p });
            }
            if value == 0.0 || !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "coefficient {index} must be finite and non-zero, got {value}"
                )));
            }
            if pos > 0 && coefficients[pos - 1].0 == index {
                return Err(Error::InvalidParameter(format!("coefficient {index} given twice")));
            }
        }
        Ok(Self { intercept, coefficients, noise_sd, covariance })
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.covariance.p()
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_sd
    }

    pub fn covariance(&self) -> &CovarianceStructure {
        &self.covariance
    }

    /// Non-zero coefficients as `(index, value)` sorted by index.
    pub fn coefficients(&self) -> &[(usize, f64)] {
        &self.coefficients
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coefficients.iter().map(|&(i, _)| i)
    }

    pub fn coefficient(&self, index: usize) -> f64 {
        self.coefficients
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.coefficients[pos].1)
            .unwrap_or(0.0)
    }

    /// Same law over `p` predictors; the support must still fit.
    pub fn with_dimension(&self, p: usize) -> Result<Self> {
        Self::new(self.intercept, self.coefficients.iter().copied(), self.noise_sd, self.covariance.with_dimension(p)?)
    }

    pub fn with_intercept(mut self, intercept: f64) -> Self {
        self.intercept = intercept;
        self
    }

    /// `intercept + Σ β_i x_i`, touching only the support.
    #[inline]
    pub fn mean_response(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().fold(self.intercept, |acc, &(i, b)| acc + b * x[i])
    }
}

/// Population moments of `(y, x_i)` under a [`RegressionModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalMoments {
    /// `Cov(y, x_i) = (R β)_i`.
    pub cov_y_x: Vec<f64>,
    /// `βᵀ R β + σ²`.
    pub var_y: f64,
    /// `Cov(y, x_i) / sqrt(var_y)`; all zero when `var_y == 0`.
    pub cor_y_x: Vec<f64>,
}

/// Exact population moments in `O(p · |support|)` without materializing `R`.
pub fn marginal_moments(model: &RegressionModel) -> MarginalMoments {
    let structure = model.covariance();
    let p = model.p();
    let support = model.coefficients();

    let mut cov_y_x = vec![0.0; p];
    for (i, c) in cov_y_x.iter_mut().enumerate() {
        *c = support.iter().map(|&(s, b)| structure.entry_unchecked(i, s) * b).sum();
    }

    let explained: f64 = support.iter().map(|&(s, b)| b * cov_y_x[s]).sum();
    let var_y = explained + model.noise_sd() * model.noise_sd();

    let cor_y_x = if var_y > 0.0 {
        let sd = math::sqrt(var_y);
        cov_y_x.iter().map(|c| (c / sd).clamp(-1.0, 1.0)).collect()
    } else {
        vec![0.0; p]
    };

    MarginalMoments { cov_y_x, var_y, cor_y_x }
}
