//! Quick self-checks behind `screenfail validate`.

use screenfail_core::{
    marginal_correlations, marginal_moments, sample_dataset, screen, solve_ar1_beta,
    solve_equi_beta, streaming_correlations, two_sample_t, Dataset, Error, RngStream,
};

use crate::harness::{run_experiment, ExperimentConfig};
use crate::report::write_report_csv;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, body: impl FnOnce() -> Result<String, String>) -> CheckOutcome {
    match body() {
        Ok(detail) => CheckOutcome { name, passed: true, detail },
        Err(detail) => CheckOutcome { name, passed: false, detail },
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

pub fn run_checks() -> Vec<CheckOutcome> {
    vec![
        check("ar1-construction", || {
            let c = solve_ar1_beta(0.25, 3.0).map_err(|e| e.to_string())?;
            ensure((c.beta1 + 0.8).abs() <= 1e-12 && (c.beta3 - 12.8).abs() <= 1e-12, format!("{c:?}"))?;
            let mm = marginal_moments(&c.model(10, 1.0).map_err(|e| e.to_string())?);
            ensure(mm.cov_y_x[0].abs() <= 1e-12 && (mm.cov_y_x[1] - 3.0).abs() <= 1e-12, "moments off")?;
            Ok("beta = (-0.8, 12.8); Cov(y,x1) = 0, Cov(y,x2) = 3".into())
        }),
        check("equi-construction", || {
            let c = solve_equi_beta(0.1, 1.0, 4.0).map_err(|e| e.to_string())?;
            let mm = marginal_moments(&c.model(10, 1.0).map_err(|e| e.to_string())?);
            ensure(mm.cov_y_x[..4].iter().all(|v| (v - 1.0).abs() <= 1e-10), "Cov(y,x1..4) != 1")?;
            ensure(mm.cov_y_x[5..].iter().all(|v| (v - 4.0).abs() <= 1e-10), "Cov(y,x6..) != 4")?;
            ensure(solve_equi_beta(0.0, 1.0, 4.0) == Err(Error::Singular { step: 4 }), "rho = 0 not singular")?;
            Ok("Cov(y,x1..4) = 1, Cov(y,x6..) = 4".into())
        }),
        check("screen-vs-sort", || {
            let mut normals = RngStream::new(1, 1).normals();
            for case in 0..1000usize {
                let p = 1 + case % 200;
                let k = 1 + (case * 31) % p;
                let w: Vec<f64> = (0..p).map(|_| (normals.next_normal() * 2.0).round() / 8.0).collect();
                let mut idx: Vec<usize> = (0..p).collect();
                idx.sort_by(|&a, &b| w[b].abs().partial_cmp(&w[a].abs()).unwrap());
                let mut expected = idx[..k].to_vec();
                expected.sort();
                ensure(screen(w, k).retained == expected, format!("case {case}"))?;
            }
            Ok("1000 random cases".into())
        }),
        check("streaming-vs-two-pass", || {
            let model = solve_equi_beta(0.1, 1.0, 4.0).and_then(|c| c.model(50, 1.0)).map_err(|e| e.to_string())?;
            let rng = RngStream::new(2, 2);
            let a = marginal_correlations(&sample_dataset(&model, 100, rng).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let b = streaming_correlations(&model, 100, rng).map_err(|e| e.to_string())?;
            let diff = a.w.iter().zip(&b.w).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            ensure(diff <= 1e-9, format!("max difference {diff:e}"))?;
            Ok(format!("max difference {diff:.1e}"))
        }),
        check("t-rank-equivalence", || {
            let mut normals = RngStream::new(3, 3).normals();
            let (n, p) = (40, 25);
            let y: Vec<f64> = (0..n).map(|k| (k % 2) as f64).collect();
            let x: Vec<f64> = (0..n * p).map(|_| normals.next_normal()).collect();
            let d = Dataset::new(n, p, y, x).map_err(|e| e.to_string())?;
            let w = marginal_correlations(&d).map_err(|e| e.to_string())?.w;
            let t = two_sample_t(&d).map_err(|e| e.to_string())?.t;
            let rank = |v: &[f64]| {
                let mut i: Vec<usize> = (0..v.len()).collect();
                i.sort_by(|&a, &b| v[b].abs().partial_cmp(&v[a].abs()).unwrap());
                i
            };
            ensure(rank(&w) == rank(&t), "rankings differ")?;
            Ok("|t| and |w| rank identically".into())
        }),
        check("worker-determinism", || {
            let config = ExperimentConfig::example1().with_n_values(vec![20, 40]).with_replications(30);
            let csv = |workers| -> Result<Vec<u8>, String> {
                let report = run_experiment(&config, workers).map_err(|e| e.to_string())?;
                let mut buf = Vec::new();
                write_report_csv(&report, &mut buf).map_err(|e| e.to_string())?;
                Ok(buf)
            };
            ensure(csv(1)? == csv(4)?, "reports differ between 1 and 4 workers")?;
            Ok("1 and 4 workers give identical CSV".into())
        }),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run_checks() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
