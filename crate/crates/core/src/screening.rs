//! Marginal screening statistics, retention rules and top-k selection.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::math;
use crate::model::RegressionModel;
use crate::rng::RngStream;
use crate::sampler::{for_each_draw, Dataset};

/// Boundary ties in `|w|` closer than this are flagged.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Per-variable sample correlations with `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlations {
    /// `w_i ∈ [-1, 1]`; zero for degenerate columns.
    pub w: Vec<f64>,
    /// Columns with zero sample variance, ascending.
    pub degenerate: Vec<usize>,
}

fn finish_correlations(sxy: &[f64], sxx: &[f64], syy: f64, varies: &[bool]) -> Correlations {
    let mut degenerate = Vec::new();
    let w = sxy
        .iter()
        .zip(sxx)
        .zip(varies)
        .enumerate()
        .map(|(j, ((&cxy, &cxx), &v))| {
            if !v || !(cxx > 0.0) {
                degenerate.push(j);
                0.0
            } else {
                (cxy / math::sqrt(cxx * syy)).clamp(-1.0, 1.0)
            }
        })
        .collect();
    Correlations { w, degenerate }
}

/// Sample Pearson correlation of every column with `y` (two passes: means,
/// then centered cross products).
pub fn marginal_correlations(dataset: &Dataset) -> Result<Correlations> {
    let (n, p) = (dataset.n(), dataset.p());
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 observations, got {n}")));
    }
    let y = dataset.y();
    let y0 = y[0];
    if y.iter().all(|&v| v == y0) {
        return Err(Error::ZeroVarianceResponse);
    }
    let inv_n = 1.0 / n as f64;
    let mean_y = y.iter().sum::<f64>() * inv_n;

    let first = dataset.row(0);
    let mut varies = vec![false; p];
    let mut mean_x = vec![0.0; p];
    for k in 0..n {
        let row = dataset.row(k);
        for ((m, v), (&x, &x0)) in mean_x.iter_mut().zip(varies.iter_mut()).zip(row.iter().zip(first)) {
            *m += x;
            *v |= x != x0;
        }
    }
    for m in &mut mean_x {
        *m *= inv_n;
    }

    let mut sxy = vec![0.0; p];
    let mut sxx = vec![0.0; p];
    let mut syy = 0.0;
    for k in 0..n {
        let dy = y[k] - mean_y;
        syy += dy * dy;
        let row = dataset.row(k);
        for j in 0..p {
            let dx = row[j] - mean_x[j];
            sxy[j] += dx * dy;
            sxx[j] += dx * dx;
        }
    }
    if !(syy > 0.0) {
        return Err(Error::ZeroVarianceResponse);
    }
    Ok(finish_correlations(&sxy, &sxx, syy, &varies))
}

/// One-pass correlation accumulator (Welford co-moment updates), for
/// screening datasets too large to hold in memory.
#[derive(Debug, Clone)]
pub struct StreamingCorrelation {
    count: usize,
    mean_y: f64,
    m2_y: f64,
    first_y: f64,
    y_varies: bool,
    mean_x: Vec<f64>,
    m2_x: Vec<f64>,
    c_xy: Vec<f64>,
    first_x: Vec<f64>,
    varies: Vec<bool>,
}

impl StreamingCorrelation {
    pub fn new(p: usize) -> Self {
        Self {
            count: 0,
            mean_y: 0.0,
            m2_y: 0.0,
            first_y: 0.0,
            y_varies: false,
            mean_x: vec![0.0; p],
            m2_x: vec![0.0; p],
            c_xy: vec![0.0; p],
            first_x: vec![0.0; p],
            varies: vec![false; p],
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, row: &[f64], y: f64) {
        debug_assert_eq!(row.len(), self.mean_x.len());
        self.count += 1;
        if self.count == 1 {
            self.first_y = y;
            self.first_x.copy_from_slice(row);
        } else {
            self.y_varies |= y != self.first_y;
        }
        let inv = 1.0 / self.count as f64;
        let dy = y - self.mean_y;
        self.mean_y += dy * inv;
        let dy_new = y - self.mean_y;
        self.m2_y += dy * dy_new;

        for j in 0..row.len() {
            let x = row[j];
            let dx = x - self.mean_x[j];
            self.mean_x[j] += dx * inv;
            self.m2_x[j] += dx * (x - self.mean_x[j]);
            self.c_xy[j] += dx * dy_new;
            self.varies[j] |= x != self.first_x[j];
        }
    }

    pub fn finish(&self) -> Result<Correlations> {
        if self.count < 3 {
            return Err(Error::InvalidParameter(format!("need at least 3 observations, got {}", self.count)));
        }
        if !self.y_varies || !(self.m2_y > 0.0) {
            return Err(Error::ZeroVarianceResponse);
        }
        Ok(finish_correlations(&self.c_xy, &self.m2_x, self.m2_y, &self.varies))
    }
}

/// Draws `n` rows from `model` and accumulates correlations without storing
/// the design matrix. Sees exactly the rows `sample_dataset` would produce.
pub fn streaming_correlations(model: &RegressionModel, n: usize, rng: RngStream) -> Result<Correlations> {
    let mut acc = StreamingCorrelation::new(model.p());
    for_each_draw(model, n, rng, |row, y| acc.push(row, y))?;
    acc.finish()
}

/// Pooled-variance two-sample t statistics for a 0/1 response.
#[derive(Debug, Clone, PartialEq)]
pub struct TStatistics {
    /// Group-1 mean minus group-0 mean over the pooled standard error.
    /// Columns with zero pooled variance get `±∞` (or 0 when the group means
    /// agree).
    pub t: Vec<f64>,
    /// Columns whose pooled within-group variance is zero.
    pub degenerate: Vec<usize>,
}

pub fn two_sample_t(dataset: &Dataset) -> Result<TStatistics> {
    let (n, p) = (dataset.n(), dataset.p());
    let y = dataset.y();
    for (row, &value) in y.iter().enumerate() {
        if value != 0.0 && value != 1.0 {
            return Err(Error::NonBinaryResponse { row, value });
        }
    }
    let n1 = y.iter().filter(|&&v| v == 1.0).count();
    let n0 = n - n1;
    if n0 == 0 || n1 == 0 {
        return Err(Error::SingleGroup { n0, n1 });
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 observations, got {n}")));
    }

    let mut sums = [vec![0.0; p], vec![0.0; p]];
    let mut firsts: [Option<&[f64]>; 2] = [None, None];
    let mut varies = [vec![false; p], vec![false; p]];
    for k in 0..n {
        let g = y[k] as usize;
        let row = dataset.row(k);
        let first = *firsts[g].get_or_insert(row);
        for j in 0..p {
            sums[g][j] += row[j];
            varies[g][j] |= row[j] != first[j];
        }
    }
    let means = [
        sums[0].iter().map(|s| s / n0 as f64).collect::<Vec<_>>(),
        sums[1].iter().map(|s| s / n1 as f64).collect::<Vec<_>>(),
    ];
    let mut ss = vec![0.0; p];
    for k in 0..n {
        let g = y[k] as usize;
        let row = dataset.row(k);
        for j in 0..p {
            let d = row[j] - means[g][j];
            ss[j] += d * d;
        }
    }

    let df = (n - 2) as f64;
    let scale = math::sqrt(1.0 / n0 as f64 + 1.0 / n1 as f64);
    let mut degenerate = Vec::new();
    let t = (0..p)
        .map(|j| {
            let diff = means[1][j] - means[0][j];
            if !(varies[0][j] || varies[1][j]) || !(ss[j] > 0.0) {
                degenerate.push(j);
                return if diff > 0.0 {
                    f64::INFINITY
                } else if diff < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    0.0
                };
            }
            diff / (math::sqrt(ss[j] / df) * scale)
        })
        .collect();
    Ok(TStatistics { t, degenerate })
}

/// How many of the largest `|w_i|` are retained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RetentionRule {
    /// Keep `n`.
    TopN,
    /// Keep `⌊n / ln n⌋`.
    NOverLogN,
    /// Keep `⌊n^(1-θ)⌋` for `θ ∈ (0, 1)`.
    Power(f64),
    FixedK(usize),
}

impl Default for RetentionRule {
    fn default() -> Self {
        Self::TopN
    }
}

impl RetentionRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Power(theta) if !(theta > 0.0 && theta < 1.0) => {
                Err(Error::InvalidParameter(format!("theta must lie in (0, 1), got {theta}")))
            }
            Self::FixedK(0) => Err(Error::InvalidParameter("fixed retention size must be positive".into())),
            _ => Ok(()),
        }
    }
}

/// Retained count for sample size `n` and dimension `p`, clamped to `[1, p]`.
pub fn resolve_k(rule: RetentionRule, n: usize, p: usize) -> usize {
    let nf = n as f64;
    let raw = match rule {
        RetentionRule::TopN => n,
        RetentionRule::NOverLogN => {
            if n < 2 {
                1
            } else {
                math::floor(nf / math::ln(nf)) as usize
            }
        }
        RetentionRule::Power(theta) => math::floor(math::powf(nf, 1.0 - theta)) as usize,
        RetentionRule::FixedK(k) => k,
    };
    raw.min(p).max(1)
}

/// Outcome of retaining the `k` largest `|w_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningResult {
    pub w: Vec<f64>,
    /// Retained indices, ascending.
    pub retained: Vec<usize>,
    pub k: usize,
    /// The k-th and (k+1)-th largest `|w|` agree within [`TIE_TOLERANCE`].
    pub tie_flag: bool,
}

/// Strict total order: larger `|w|` first, then lower index.
#[inline]
fn rank_order(w: &[f64], a: usize, b: usize) -> Ordering {
    w[b].abs().total_cmp(&w[a].abs()).then(a.cmp(&b))
}

/// Retains the indices of the `k` largest `|w_i|`, breaking ties by lower
/// index. Uses expected-linear-time selection, so large `p` is never fully
/// sorted; `k` is clamped to `[1, p]` when `w` is non-empty.
pub fn screen(w: Vec<f64>, k: usize) -> ScreeningResult {
    let p = w.len();
    if p == 0 {
        return ScreeningResult { w, retained: Vec::new(), k: 0, tie_flag: false };
    }
    let k = k.clamp(1, p);
    if k == p {
        return ScreeningResult { retained: (0..p).collect(), w, k, tie_flag: false };
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.select_nth_unstable_by(k - 1, |&a, &b| rank_order(&w, a, b));
    let boundary = w[order[k - 1]].abs();
    let best_excluded = order[k..].iter().map(|&j| w[j].abs()).fold(f64::NEG_INFINITY, f64::max);
    let tie_flag = (boundary - best_excluded).abs() <= TIE_TOLERANCE;
    let mut retained = order;
    retained.truncate(k);
    retained.sort_unstable();
    ScreeningResult { w, retained, k, tie_flag }
}

/// Whether variable `i` is among the retained set.
pub fn survives(result: &ScreeningResult, i: usize) -> Result<bool> {
    if i >= result.w.len() {
        return Err(Error::IndexOutOfRange { index: i, dim: result.w.len() });
    }
    Ok(result.retained.binary_search(&i).is_ok())
}
