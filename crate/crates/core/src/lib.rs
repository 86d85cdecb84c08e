//! Sum-product generalizations of Hill's tail-index statistic.
//!
//! * [`combinatorics`]: compositions and the exact integer families behind
//!   the limiting covariance.
//! * [`estimators`]: `T_n(p)` by chain enumeration and by iterated
//!   integration, Hill's statistic, the moment form and index estimates.
//! * [`limit`]: variances and covariances of the limiting Gaussian process.
//! * [`domains`]: reference distributions, sampling and centering constants.
//! * [`montecarlo`]: simulation harness and quadrature oracle for the limit.

pub mod combinatorics;
pub mod domains;
pub mod error;
pub mod estimators;
pub mod limit;
pub mod montecarlo;
pub mod numeric;

pub use error::{Error, Result};
