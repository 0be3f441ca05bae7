//! Brute-force failure-probability estimator.
//!
//! Deliberately independent of the fast pipeline: the correlation matrix is
//! materialized and factored with nalgebra, normals come from `rand_distr`,
//! correlations use the textbook one-pass formula and ranking is a full sort.
//! Only the model description is shared.

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use screenfail_core::{CovarianceKind, RegressionModel};

use crate::error::{HarnessError, Result};

/// Largest dimension the oracle accepts.
pub const ORACLE_MAX_P: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimate {
    /// Zero-based.
    pub variable: usize,
    pub failures: usize,
    pub trials: usize,
    pub proportion: f64,
    pub se: f64,
}

fn correlation_matrix(model: &RegressionModel) -> DMatrix<f64> {
    let p = model.p();
    match model.covariance().kind() {
        CovarianceKind::Ar1 { rho } => DMatrix::from_fn(p, p, |i, j| rho.powi(i.abs_diff(j) as i32)),
        CovarianceKind::Equicorrelated { rho } => DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { *rho }),
        CovarianceKind::Identity => DMatrix::identity(p, p),
        CovarianceKind::Dense(d) => DMatrix::from_fn(p, p, |i, j| d.matrix().get(i, j)),
    }
}

fn naive_correlation(x: impl Iterator<Item = f64>, y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (a, &b) in x.zip(y) {
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    let cov = sxy - sx * sy / n;
    let vx = sxx - sx * sx / n;
    let vy = syy - sy * sy / n;
    if vx <= 0.0 || vy <= 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

/// Estimates, for each tracked variable, the probability that it is not among
/// the `k` largest `|w|` when `n` rows are drawn from `model`.
pub fn oracle_failure_probability(
    model: &RegressionModel,
    n: usize,
    k: usize,
    tracked: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<OracleEstimate>> {
    let p = model.p();
    if p > ORACLE_MAX_P {
        return Err(HarnessError::Oracle(format!("p = {p} exceeds the oracle limit {ORACLE_MAX_P}")));
    }
    if n < 3 || trials == 0 || k == 0 {
        return Err(HarnessError::Oracle(format!("need n >= 3, trials >= 1 and k >= 1 (n = {n}, trials = {trials}, k = {k})")));
    }
    if let Some(&i) = tracked.iter().find(|&&i| i >= p) {
        return Err(HarnessError::Oracle(format!("tracked variable {i} out of range for p = {p}")));
    }
    let lt = correlation_matrix(model)
        .cholesky()
        .ok_or_else(|| HarnessError::Oracle("correlation matrix is not positive definite".into()))?
        .l()
        .transpose();
    let mut beta = DVector::zeros(p);
    for &(i, b) in model.coefficients() {
        beta[i] = b;
    }
    let sigma = model.noise_sd();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = vec![0usize; tracked.len()];

    for _ in 0..trials {
        let z = DMatrix::<f64>::from_fn(n, p, |_, _| rng.sample(StandardNormal));
        let x = z * &lt;
        let noise = DVector::<f64>::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y: Vec<f64> = (&x * &beta + noise * sigma).iter().map(|v| v + model.intercept()).collect();

        let w: Vec<f64> = (0..p).map(|j| naive_correlation(x.column(j).iter().copied(), &y)).collect();
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| w[b].abs().partial_cmp(&w[a].abs()).unwrap().then(a.cmp(&b)));
        let kept = &order[..k.min(p)];
        for (count, &i) in failures.iter_mut().zip(tracked) {
            if !kept.contains(&i) {
                *count += 1;
            }
        }
    }

    Ok(tracked
        .iter()
        .zip(failures)
        .map(|(&variable, failures)| {
            let proportion = failures as f64 / trials as f64;
            OracleEstimate {
                variable,
                failures,
                trials,
                proportion,
                se: (proportion * (1.0 - proportion) / trials as f64).sqrt(),
            }
        })
        .collect())
}
