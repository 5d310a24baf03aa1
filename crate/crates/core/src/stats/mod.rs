//! Statistics toolkit: streaming accumulators with associative merge,
//! goodness-of-fit tests, covariance with jackknife errors, and time-series
//! helpers (autocorrelation, batch means, exponential-rate fits).

mod accumulator;
mod cov;
mod gof;
mod series;

pub use accumulator::{Accumulator, CovAccumulator};
pub use cov::{covariance_jackknife, CovarianceEstimate};
pub use gof::{chi_square_gof, kolmogorov_survival, ks_statistic, ks_test, ks_test_jittered, TestReport};
pub use series::{autocorrelation, batch_means, fit_exp_rate};
