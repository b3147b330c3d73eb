//! Location t-tests, fixed-b critical values, and forecast-comparison tests.

mod dm;
mod fixed_b;

pub use dm::{dm_forecast_harness, dm_test, dm_test_with, DmDesign};
pub(crate) use dm::dm_reference;
pub use fixed_b::{fixed_b_critical_value, CACHE_ENV};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::kernels::LagKernel;
use crate::lrv::{LrvEstimate, LrvMethod, Reference};
use crate::scalar::Real;
use crate::sls_models::TimeSeries;

/// Simulation settings for fixed-b critical values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedBConfig {
    pub n_sim: usize,
    pub grid: usize,
    pub seed: u64,
}

impl Default for FixedBConfig {
    fn default() -> Self {
        FixedBConfig { n_sim: 200_000, grid: 2000, seed: 20_240_601 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    pub fixed_b: FixedBConfig,
    /// Reference used for full-bandwidth Bartlett in forecast comparisons.
    pub dm_kvb_reference: Reference,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig { fixed_b: FixedBConfig::default(), dm_kvb_reference: Reference::FixedBSim }
    }
}

/// A two-sided test decision.
#[derive(Clone, Debug, PartialEq)]
pub struct TestResult<S> {
    pub statistic: S,
    pub method: String,
    pub reference: Reference,
    pub critical_value: f64,
    pub level: f64,
    pub reject: bool,
    pub p_value: Option<f64>,
    pub lrv: LrvEstimate<S>,
}

impl<S: Real> TestResult<S> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "statistic": self.statistic.to_f64_lossy(),
            "method": self.method,
            "reference": self.reference.label(),
            "critical_value": self.critical_value,
            "level": self.level,
            "reject": self.reject,
            "p_value": self.p_value,
            "lrv": self.lrv.to_json(),
        })
    }
}

/// Two-sided critical value for `reference` at `level`.
pub fn critical_value(reference: Reference, level: f64, cfg: &FixedBConfig) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("level = {level} must lie in (0, 1)")));
    }
    match reference {
        Reference::StdNormal => Ok(Normal::standard().inverse_cdf(1.0 - level / 2.0)),
        Reference::StudentT(b) => {
            let t = StudentsT::new(0.0, 1.0, b as f64).map_err(|e| Error::Domain(e.to_string()))?;
            Ok(t.inverse_cdf(1.0 - level / 2.0))
        }
        Reference::FixedBSim => fixed_b_critical_value(LagKernel::Bartlett, 1.0, level, cfg.n_sim, cfg.grid, cfg.seed),
    }
}

/// Two-sided p-value where the reference has a closed-form CDF.
pub fn p_value(reference: Reference, statistic: f64) -> Option<f64> {
    let a = statistic.abs();
    match reference {
        Reference::StdNormal => Some(2.0 * Normal::standard().sf(a)),
        Reference::StudentT(b) => StudentsT::new(0.0, 1.0, b as f64).ok().map(|t| 2.0 * t.sf(a)),
        Reference::FixedBSim => None,
    }
}

pub(crate) fn studentize<S: Real>(numerator: S, n: usize, lrv: S) -> Result<S> {
    if !(lrv > S::zero()) || !lrv.is_finite() {
        return Err(Error::DegenerateVariance(lrv.to_f64_lossy()));
    }
    Ok(S::of(n).sqrt() * numerator / lrv.sqrt())
}

pub(crate) fn has_variation<S: Real>(v: &[S]) -> bool {
    v.iter().any(|&x| x != v[0])
}

/// `√T(ȳ − β₀)/√Ĵ` for `H₀: E y = β₀`, with the method's own reference distribution.
pub fn t_test_location<S: Real>(y: &TimeSeries<S>, beta0: f64, method: LrvMethod, level: f64) -> Result<TestResult<S>> {
    t_test_location_with(y, beta0, method, level, &InferenceConfig::default())
}

pub fn t_test_location_with<S: Real>(
    y: &TimeSeries<S>,
    beta0: f64,
    method: LrvMethod,
    level: f64,
    cfg: &InferenceConfig,
) -> Result<TestResult<S>> {
    if !has_variation(y.values()) {
        return Err(Error::DegenerateVariance(0.0));
    }
    let reference = method.reference(y.len());
    let cv = critical_value(reference, level, &cfg.fixed_b)?;
    let lrv = method.estimate(y)?;
    let statistic = studentize(y.mean() - S::lit(beta0), y.len(), lrv.value)?;
    Ok(TestResult {
        statistic,
        method: method.label(),
        reference,
        critical_value: cv,
        level,
        reject: statistic.abs().to_f64_lossy() > cv,
        p_value: p_value(reference, statistic.to_f64_lossy()),
        lrv,
    })
}
