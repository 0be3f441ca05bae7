//! Structured Gaussian regression models and marginal-correlation screening.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature; in that configuration the `libm` feature supplies the float
//! functions.
//!
//! Indices are zero-based throughout: "variable 0" is the first predictor.
//! Front ends that print `x1, x2, ...` are expected to add one.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("screenfail-core needs either the `std` or the `libm` feature");

extern crate alloc;

mod error;
mod math;

pub mod linalg;
pub mod model;
pub mod rng;
pub mod sampler;
pub mod screening;

pub use error::{Error, Result};
pub use linalg::{solve_linear_system, SquareMatrix};
pub use model::{
    covariance_entry, marginal_moments, solve_ar1_beta, solve_equi_beta, spectral_bound,
    Ar1Construction, CovarianceKind, CovarianceStructure, EquiConstruction, MarginalMoments,
    RegressionModel,
};
pub use rng::{inverse_normal_cdf, replication_stream_id, NormalStream, RngStream, GENERATOR_NAME};
pub use sampler::{sample_dataset, sample_predictors, Dataset, PredictorSampler};
pub use screening::{
    marginal_correlations, resolve_k, screen, streaming_correlations, survives, two_sample_t,
    Correlations, RetentionRule, ScreeningResult, StreamingCorrelation, TStatistics,
};
