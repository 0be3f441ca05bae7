//! Monte Carlo harness, brute-force oracle, report files and CLI for
//! marginal-correlation screening experiments built on `screenfail-core`.

pub mod cli;
mod error;
pub mod harness;
pub mod oracle;
pub mod report;
pub mod validate;

pub use error::{HarnessError, Result};
pub use harness::{
    replication_dataset, run_experiment, run_replication, DimensionRule, ExperimentConfig,
    ExperimentReport, ModelSpec, ReportRow, DEFAULT_MEMORY_BUDGET, DEFAULT_SEED,
};
pub use oracle::{oracle_failure_probability, OracleEstimate};
