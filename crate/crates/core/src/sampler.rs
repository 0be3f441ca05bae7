//! Draws from `N(0, R)` and from the full regression law.
//!
//! Structured kinds cost O(p) per row: AR(1) through its Markov recursion,
//! equicorrelation through a single shared factor. Explicit matrices use the
//! Cholesky factor computed when the structure was built.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{CovarianceKind, CovarianceStructure, DenseCorrelation, RegressionModel};
use crate::rng::{NormalStream, RngStream};

/// Row generator for one covariance structure.
#[derive(Debug, Clone)]
pub enum PredictorSampler {
    Ar1 { rho: f64, innovation_sd: f64, p: usize },
    OneFactor { factor_loading: f64, idio_sd: f64, p: usize },
    Independent { p: usize },
    Cholesky { dense: Arc<DenseCorrelation> },
}

impl PredictorSampler {
    pub fn new(structure: &CovarianceStructure) -> Self {
        let p = structure.p();
        match structure.kind() {
            CovarianceKind::Ar1 { rho } => {
                Self::Ar1 { rho: *rho, innovation_sd: math::sqrt(1.0 - rho * rho), p }
            }
            CovarianceKind::Equicorrelated { rho } => {
                Self::OneFactor { factor_loading: math::sqrt(*rho), idio_sd: math::sqrt(1.0 - rho), p }
            }
            CovarianceKind::Identity => Self::Independent { p },
            CovarianceKind::Dense(d) => Self::Cholesky { dense: Arc::clone(d) },
        }
    }

    pub fn p(&self) -> usize {
        match self {
            Self::Ar1 { p, .. } | Self::OneFactor { p, .. } | Self::Independent { p } => *p,
            Self::Cholesky { dense } => dense.matrix().dim(),
        }
    }

    /// Standard normals consumed per row: `p + 1` for the one-factor form
    /// (shared factor first), `p` otherwise.
    pub fn variates_per_row(&self) -> usize {
        match self {
            Self::OneFactor { p, .. } => p + 1,
            _ => self.p(),
        }
    }

    /// Maps standard normals `z` (length [`variates_per_row`](Self::variates_per_row))
    /// to one predictor row.
    pub fn transform(&self, z: &[f64], out: &mut [f64]) {
        debug_assert_eq!(z.len(), self.variates_per_row());
        debug_assert_eq!(out.len(), self.p());
        match self {
            Self::Ar1 { rho, innovation_sd, .. } => {
                let mut prev = z[0];
                out[0] = prev;
                for (o, &zj) in out[1..].iter_mut().zip(&z[1..]) {
                    prev = rho * prev + innovation_sd * zj;
                    *o = prev;
                }
            }
            Self::OneFactor { factor_loading, idio_sd, .. } => {
                let common = factor_loading * z[0];
                for (o, &zj) in out.iter_mut().zip(&z[1..]) {
                    *o = common + idio_sd * zj;
                }
            }
            Self::Independent { .. } => out.copy_from_slice(z),
            Self::Cholesky { dense } => {
                let l = dense.factor();
                for (i, o) in out.iter_mut().enumerate() {
                    *o = l.row(i)[..=i].iter().zip(z).map(|(a, b)| a * b).sum();
                }
            }
        }
    }

    /// Draws one row. `scratch` is only used by the Cholesky path and is
    /// resized as needed.
    pub fn sample_row(&self, normals: &mut NormalStream, scratch: &mut Vec<f64>, out: &mut [f64]) {
        match self {
            Self::Ar1 { rho, innovation_sd, .. } => {
                let mut prev = normals.next_normal();
                out[0] = prev;
                for o in &mut out[1..] {
                    prev = rho * prev + innovation_sd * normals.next_normal();
                    *o = prev;
                }
            }
            Self::OneFactor { factor_loading, idio_sd, .. } => {
                let common = factor_loading * normals.next_normal();
                for o in out.iter_mut() {
                    *o = common + idio_sd * normals.next_normal();
                }
            }
            Self::Independent { .. } => normals.fill(out),
            Self::Cholesky { .. } => {
                scratch.resize(self.variates_per_row(), 0.0);
                normals.fill(scratch);
                self.transform(scratch, out);
            }
        }
    }
}

/// `n` draws of `(y, x)`. `x` is row-major `n × p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    p: usize,
    y: Vec<f64>,
    x: Vec<f64>,
}

impl Dataset {
    pub fn new(n: usize, p: usize, y: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: y.len() });
        }
        if x.len() != n * p {
            return Err(Error::DimensionMismatch { expected: n * p, actual: x.len() });
        }
        if let Some(pos) = y.iter().chain(&x).position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("dataset has a non-finite value at flat position {pos}")));
        }
        Ok(Self { n, p, y, x })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.x[k * self.p..(k + 1) * self.p]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.x.iter().skip(j).step_by(self.p).copied()
    }

    pub fn y_mut(&mut self) -> &mut [f64] {
        &mut self.y
    }

    pub fn x_mut(&mut self) -> &mut [f64] {
        &mut self.x
    }
}

/// `n` i.i.d. rows from `N(0, R)`, returned row-major.
pub fn sample_predictors(structure: &CovarianceStructure, n: usize, rng: RngStream) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let sampler = PredictorSampler::new(structure);
    let p = sampler.p();
    let mut normals = rng.normals();
    let mut scratch = Vec::new();
    let mut x = vec![0.0; n * p];
    for row in x.chunks_exact_mut(p) {
        sampler.sample_row(&mut normals, &mut scratch, row);
    }
    Ok(x)
}

/// Generates `n` draws of `(x, y)` and hands each to `visit` without storing
/// them. Per row, the predictor variates are consumed before the noise
/// variate, so [`sample_dataset`] and streaming consumers see the same data.
pub fn for_each_draw(
    model: &RegressionModel,
    n: usize,
    rng: RngStream,
    mut visit: impl FnMut(&[f64], f64),
) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("sample size must be at least 3, got {n}")));
    }
    let sampler = PredictorSampler::new(model.covariance());
    let mut normals = rng.normals();
    let mut scratch = Vec::new();
    let mut row = vec![0.0; model.p()];
    let sigma = model.noise_sd();
    for _ in 0..n {
        sampler.sample_row(&mut normals, &mut scratch, &mut row);
        let eps = normals.next_normal();
        let y = model.mean_response(&row) + sigma * eps;
        visit(&row, y);
    }
    Ok(())
}

/// Materialized `n` draws from the regression law.
pub fn sample_dataset(model: &RegressionModel, n: usize, rng: RngStream) -> Result<Dataset> {
    let p = model.p();
    let mut x = Vec::with_capacity(n.saturating_mul(p));
    let mut y = Vec::with_capacity(n);
    for_each_draw(model, n, rng, |row, yk| {
        x.extend_from_slice(row);
        y.push(yk);
    })?;
    Ok(Dataset { n, p, y, x })
}
