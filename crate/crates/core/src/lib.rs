//! Long-run variance estimation and HAR inference under segmented locally
//! stationary data with low-frequency contamination.
//!
//! The crate is organised bottom-up: [`sls_models`] simulates data,
//! [`spectral`] estimates autocovariances and periodograms, [`lrv`] holds the
//! long-run variance estimators, [`inference`] builds tests on top of them,
//! [`edgeworth`] evaluates second-order corrections and [`montecarlo`] runs
//! seeded size/power experiments.

pub mod edgeworth;
pub mod error;
pub mod inference;
pub mod io;
pub mod kernels;
pub mod lrv;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod sls_models;
pub mod spectral;

pub use error::{Error, Result};
pub use kernels::{LagKernel, SmoothingKernel};
pub use lrv::{LrvEstimate, LrvMethod, Reference};
pub use scalar::Real;
pub use sls_models::{SlsSpec, TimeSeries};

pub type TimeSeriesF64 = TimeSeries<f64>;
pub type TimeSeriesF32 = TimeSeries<f32>;
