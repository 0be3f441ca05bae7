//! Monte Carlo screening experiments: replicate, screen, count failures.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use screenfail_core::{
    marginal_correlations, replication_stream_id, resolve_k, sample_dataset, screen,
    solve_ar1_beta, solve_equi_beta, streaming_correlations, survives, Dataset, RegressionModel,
    RetentionRule, RngStream, GENERATOR_NAME,
};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

/// Default seed when neither a flag nor the environment supplies one.
pub const DEFAULT_SEED: u64 = 7;

/// Above this many design-matrix entries a replication streams its rows
/// instead of materializing them.
pub const DEFAULT_MEMORY_BUDGET: usize = 200_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// AR(1) predictors; coefficients on x1 and x3 hide x1 from `y`.
    Example1 { rho: f64, a: f64, sigma: f64 },
    /// Equicorrelated predictors; coefficients on x1..x5 make x1..x4 weaker
    /// than every null predictor.
    Example2 { rho: f64, sigma: f64, important_cov: f64, unimportant_cov: f64 },
    /// Any model; resized to each experiment's dimension.
    Custom(RegressionModel),
}

impl ModelSpec {
    pub fn example1() -> Self {
        Self::Example1 { rho: 0.25, a: 3.0, sigma: 1.0 }
    }

    pub fn example2() -> Self {
        Self::Example2 { rho: 0.1, sigma: 1.0, important_cov: 1.0, unimportant_cov: 4.0 }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Example1 { .. } => "example1",
            Self::Example2 { .. } => "example2",
            Self::Custom(_) => "custom",
        }
    }

    /// Variables reported by default (zero-based).
    pub fn default_tracked(&self) -> Vec<usize> {
        match self {
            Self::Example1 { .. } => vec![0],
            Self::Example2 { .. } => vec![0, 1, 2, 3],
            Self::Custom(model) => model.support().collect(),
        }
    }

    pub fn build(&self, p: usize) -> screenfail_core::Result<RegressionModel> {
        match *self {
            Self::Example1 { rho, a, sigma } => solve_ar1_beta(rho, a)?.model(p, sigma),
            Self::Example2 { rho, sigma, important_cov, unimportant_cov } => {
                solve_equi_beta(rho, important_cov, unimportant_cov)?.model(p, sigma)
            }
            Self::Custom(ref model) => model.with_dimension(p),
        }
    }
}

/// How the predictor count grows with the sample size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionRule {
    /// `p = c · n`.
    Linear(usize),
    /// `p = n²`.
    Square,
    Fixed(usize),
}

impl DimensionRule {
    pub fn resolve(&self, n: usize) -> Option<usize> {
        match *self {
            Self::Linear(c) => c.checked_mul(n),
            Self::Square => n.checked_mul(n),
            Self::Fixed(p) => Some(p),
        }
        .filter(|&p| p > 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub n_values: Vec<usize>,
    pub dimension: DimensionRule,
    pub retention: RetentionRule,
    pub replications: usize,
    /// Zero-based variable indices whose survival is recorded.
    pub tracked: Vec<usize>,
    pub master_seed: u64,
    pub memory_budget: usize,
}

impl ExperimentConfig {
    /// `p = 2n`, keep the `n` largest, 100 replications, tracked variables
    /// from [`ModelSpec::default_tracked`].
    pub fn new(model: ModelSpec, n_values: Vec<usize>) -> Self {
        let tracked = model.default_tracked();
        Self {
            model,
            n_values,
            dimension: DimensionRule::Linear(2),
            retention: RetentionRule::TopN,
            replications: 100,
            tracked,
            master_seed: DEFAULT_SEED,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }

    pub fn example1() -> Self {
        Self::new(ModelSpec::example1(), vec![50, 200, 500, 1000])
    }

    pub fn example2() -> Self {
        Self::new(ModelSpec::example2(), vec![100, 500, 1000])
    }

    pub fn with_dimension(mut self, dimension: DimensionRule) -> Self {
        self.dimension = dimension;
        self
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_n_values(mut self, n_values: Vec<usize>) -> Self {
        self.n_values = n_values;
        self
    }

    pub fn with_retention(mut self, retention: RetentionRule) -> Self {
        self.retention = retention;
        self
    }

    pub fn with_tracked(mut self, tracked: Vec<usize>) -> Self {
        self.tracked = tracked;
        self
    }

    /// Checks the configuration; returns warnings for tracked variables that
    /// are outside the model support.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.replications > u32::MAX as usize || self.n_values.len() > u32::MAX as usize {
            return bad("too many replications or sample sizes".into());
        }
        if self.n_values.is_empty() {
            return bad("at least one sample size is required".into());
        }
        if self.tracked.is_empty() {
            return bad("at least one tracked variable is required".into());
        }
        self.retention.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        let mut warnings = Vec::new();
        for &n in &self.n_values {
            if n < 3 {
                return bad(format!("sample size {n} is below the minimum of 3"));
            }
            let p = self.dimension.resolve(n).ok_or_else(|| HarnessError::Config(format!("dimension overflows for n = {n}")))?;
            let model = self.model.build(p).map_err(|source| HarnessError::Model { n, source })?;
            if let Some(&i) = self.tracked.iter().find(|&&i| i >= p) {
                return bad(format!("tracked variable x{} exceeds p = {p} at n = {n}", i + 1));
            }
            if warnings.is_empty() {
                for &i in &self.tracked {
                    if model.coefficient(i) == 0.0 {
                        warnings.push(format!("tracked variable x{} is not in the model support", i + 1));
                    }
                }
            }
        }
        Ok(warnings)
    }

    /// Stable digest of every setting that affects results.
    pub fn config_hash(&self) -> String {
        let mut canonical = String::new();
        let _ = write!(
            canonical,
            "{:?}|{:?}|{:?}|{:?}|{}|{:?}|{}|{}",
            self.model, self.n_values, self.dimension, self.retention, self.replications, self.tracked,
            self.master_seed, GENERATOR_NAME
        );
        let digest = Sha256::digest(canonical.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Resolved model and sizes for one sample size.
#[derive(Debug, Clone)]
struct Design {
    n_index: u32,
    n: usize,
    p: usize,
    k: usize,
    model: RegressionModel,
}

fn design(config: &ExperimentConfig, n_index: usize) -> Result<Design> {
    let n = *config
        .n_values
        .get(n_index)
        .ok_or_else(|| HarnessError::Config(format!("sample size index {n_index} out of range")))?;
    let p = config.dimension.resolve(n).ok_or_else(|| HarnessError::Config(format!("dimension overflows for n = {n}")))?;
    let model = config.model.build(p).map_err(|source| HarnessError::Model { n, source })?;
    let k = resolve_k(config.retention, n, p);
    Ok(Design { n_index: n_index as u32, n, p, k, model })
}

fn stream(config: &ExperimentConfig, design: &Design, rep_index: usize) -> RngStream {
    RngStream::new(config.master_seed, replication_stream_id(design.n_index, rep_index as u32))
}

fn replicate(config: &ExperimentConfig, design: &Design, rep_index: usize) -> Result<Vec<bool>> {
    let rng = stream(config, design, rep_index);
    let wrap = |source| HarnessError::Replication { n: design.n, rep_index, source };
    let correlations = if design.n.saturating_mul(design.p) <= config.memory_budget {
        let data = sample_dataset(&design.model, design.n, rng).map_err(wrap)?;
        marginal_correlations(&data)
    } else {
        streaming_correlations(&design.model, design.n, rng)
    }
    .map_err(wrap)?;
    let result = screen(correlations.w, design.k);
    config.tracked.iter().map(|&i| survives(&result, i).map_err(wrap)).collect()
}

/// Survival of each tracked variable in replication `rep_index` at the
/// `n_index`-th sample size. Deterministic in its arguments.
pub fn run_replication(config: &ExperimentConfig, n_index: usize, rep_index: usize) -> Result<Vec<bool>> {
    if rep_index >= config.replications {
        return Err(HarnessError::Config(format!(
            "replication {rep_index} out of range for {} replications",
            config.replications
        )));
    }
    replicate(config, &design(config, n_index)?, rep_index)
}

/// The dataset replication `rep_index` draws at the `n_index`-th sample size.
pub fn replication_dataset(config: &ExperimentConfig, n_index: usize, rep_index: usize) -> Result<Dataset> {
    let d = design(config, n_index)?;
    sample_dataset(&d.model, d.n, stream(config, &d, rep_index))
        .map_err(|source| HarnessError::Replication { n: d.n, rep_index, source })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub p: usize,
    /// Zero-based.
    pub variable: usize,
    pub failure_count: usize,
    pub replications: usize,
    pub failure_proportion: f64,
    pub mc_se: f64,
}

impl ReportRow {
    fn new(n: usize, p: usize, variable: usize, failure_count: usize, replications: usize) -> Self {
        let prop = failure_count as f64 / replications as f64;
        let mc_se = (prop * (1.0 - prop) / replications as f64).sqrt();
        Self { n, p, variable, failure_count, replications, failure_proportion: prop, mc_se }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub example: String,
    pub rows: Vec<ReportRow>,
    pub config_hash: String,
    pub master_seed: u64,
    pub generator: &'static str,
    pub version: &'static str,
    pub wall_time: Duration,
}

impl ExperimentReport {
    pub fn row(&self, n: usize, variable: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.n == n && r.variable == variable)
    }
}

/// Runs every replication at every sample size on `workers` threads.
///
/// Failure counts are plain sums, so the report does not depend on the
/// worker count or scheduling order. The first failing replication (in
/// `(n, rep)` order) aborts the run.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let started = Instant::now();
    let tracked = config.tracked.len();
    let mut rows = Vec::with_capacity(config.n_values.len() * tracked);

    for n_index in 0..config.n_values.len() {
        let d = design(config, n_index)?;
        let outcomes: Vec<Result<Vec<bool>>> =
            pool.install(|| (0..config.replications).into_par_iter().map(|r| replicate(config, &d, r)).collect());
        let mut failures = vec![0usize; tracked];
        for outcome in outcomes {
            for (count, survived) in failures.iter_mut().zip(outcome?) {
                *count += usize::from(!survived);
            }
        }
        rows.extend(
            config
                .tracked
                .iter()
                .zip(failures)
                .map(|(&variable, count)| ReportRow::new(d.n, d.p, variable, count, config.replications)),
        );
    }

    Ok(ExperimentReport {
        example: config.model.label().to_string(),
        rows,
        config_hash: config.config_hash(),
        master_seed: config.master_seed,
        generator: GENERATOR_NAME,
        version: env!("CARGO_PKG_VERSION"),
        wall_time: started.elapsed(),
    })
}
