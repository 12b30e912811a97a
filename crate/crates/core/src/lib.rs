//! Spot volatility and time-change estimation from noisy high-frequency prices.
//!
//! The estimator runs in three stages:
//!
//! 1. [`preaverage`]: sine-weighted pre-averaged increments and local noise
//!    levels on `n0` fine bins;
//! 2. [`charfn`]: local characteristic-function estimates and bias-corrected
//!    spot volatilities on `n2` coarse bins;
//! 3. [`smoothing`]: local-polynomial smoothing into `c̃_t(u)` and the
//!    normalised rate `r̃_t(u)`.
//!
//! [`tuning`] selects parameters by generalised cross-validation, [`sim`]
//! generates synthetic data, and [`oracle`] evaluates the population
//! quantities the estimates target.

pub mod bench;
pub mod charfn;
pub mod error;
pub mod io;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod preaverage;
pub mod quad;
pub mod sim;
pub mod smoothing;
pub mod tuning;

pub use error::{Error, Result};
