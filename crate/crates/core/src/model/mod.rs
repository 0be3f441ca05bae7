//! Covariance structures, the linear-Gaussian regression law, adversarial
//! coefficient constructions and exact population moments.

mod construct;
mod covariance;
mod regression;

pub use construct::{solve_ar1_beta, solve_equi_beta, Ar1Construction, EquiConstruction};
pub use covariance::{
    covariance_entry, spectral_bound, CovarianceKind, CovarianceStructure, DenseCorrelation,
    MAX_DENSE_DIM,
};
pub use regression::{marginal_moments, MarginalMoments, RegressionModel};
