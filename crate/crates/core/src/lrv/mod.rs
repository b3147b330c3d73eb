//! Long-run variance estimators.

mod dk;
mod ewc;
mod hac;

pub use dk::{block_length, d1_reference, dk_bandwidths, dk_bandwidths_with, dk_hac, dk_integrated_acf, DkBandwidths};
pub use ewc::{ewc, ewc_default_b};
pub use hac::{andrews91, ar1_fit, clip_prewhitening, hac, kvb, nw87, PREWHITEN_BOUND};
pub(crate) use hac::{hac_sum, kvb_partial_sums};
pub use crate::kernels::{LagKernel, SmoothingKernel};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sls_models::TimeSeries;

/// An LRV value with the tuning that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrvEstimate<S> {
    pub value: S,
    pub method: String,
    /// Lag-window bandwidth (or, for EWC, the number of cosine terms).
    pub b1: f64,
    pub b2: Option<f64>,
    #[serde(rename = "n_T")]
    pub n_t: Option<usize>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl<S: Real> LrvEstimate<S> {
    pub(crate) fn new(value: S, method: &str, b1: f64) -> Self {
        LrvEstimate { value, method: method.to_string(), b1, b2: None, n_t: None, diagnostics: BTreeMap::new() }
    }

    pub(crate) fn diag(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": self.value.to_f64_lossy(),
            "method": self.method,
            "b1": self.b1,
            "b2": self.b2,
            "n_T": self.n_t,
            "diagnostics": self.diagnostics,
        })
    }
}

/// Reference distribution for a t-type statistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    StdNormal,
    FixedBSim,
    StudentT(usize),
}

impl Reference {
    pub fn label(self) -> String {
        match self {
            Reference::StdNormal => "std-normal".into(),
            Reference::FixedBSim => "fixed-b-sim".into(),
            Reference::StudentT(b) => format!("student-t({b})"),
        }
    }
}

/// LRV method descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LrvMethod {
    Dk,
    DkPw,
    A91,
    A91Pw,
    Nw87,
    Kvb,
    /// Cosine estimator with `B` terms; `None` applies the default rule.
    Ewc(Option<usize>),
    /// Kernel HAC at a fixed bandwidth on demeaned data.
    Hac(LagKernel, f64),
}

pub const METHOD_NAMES: [&str; 7] = ["dk", "dk-pw", "a91", "a91-pw", "nw87", "kvb", "ewc"];

impl LrvMethod {
    /// The seven methods compared in the size/power experiments.
    pub fn standard_set() -> Vec<LrvMethod> {
        vec![
            LrvMethod::Dk,
            LrvMethod::DkPw,
            LrvMethod::A91,
            LrvMethod::A91Pw,
            LrvMethod::Nw87,
            LrvMethod::Kvb,
            LrvMethod::Ewc(None),
        ]
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "dk" => Ok(LrvMethod::Dk),
            "dk-pw" | "dk-pw-approx" => Ok(LrvMethod::DkPw),
            "a91" => Ok(LrvMethod::A91),
            "a91-pw" => Ok(LrvMethod::A91Pw),
            "nw87" => Ok(LrvMethod::Nw87),
            "kvb" => Ok(LrvMethod::Kvb),
            "ewc" => Ok(LrvMethod::Ewc(None)),
            other => {
                if let Some(b) = other.strip_prefix("ewc:") {
                    if let Ok(b) = b.parse() {
                        return Ok(LrvMethod::Ewc(Some(b)));
                    }
                }
                Err(Error::Lookup { kind: "method", name: name.to_string(), valid: METHOD_NAMES.join(", ") })
            }
        }
    }

    /// Label used in tables and output headers.
    pub fn label(&self) -> String {
        match self {
            LrvMethod::Dk => "dk".into(),
            LrvMethod::DkPw => "dk-pw-approx".into(),
            LrvMethod::A91 => "a91".into(),
            LrvMethod::A91Pw => "a91-pw".into(),
            LrvMethod::Nw87 => "nw87".into(),
            LrvMethod::Kvb => "kvb".into(),
            LrvMethod::Ewc(None) => "ewc".into(),
            LrvMethod::Ewc(Some(b)) => format!("ewc:{b}"),
            LrvMethod::Hac(k, b) => format!("hac-{}:{b}", k.name()),
        }
    }

    /// Reference distribution of the location t-statistic at sample size `t_len`.
    pub fn reference(&self, t_len: usize) -> Reference {
        match self {
            LrvMethod::Kvb => Reference::FixedBSim,
            LrvMethod::Ewc(b) => Reference::StudentT(b.unwrap_or_else(|| ewc_default_b(t_len))),
            _ => Reference::StdNormal,
        }
    }

    pub fn estimate<S: Real>(&self, y: &TimeSeries<S>) -> Result<LrvEstimate<S>> {
        match *self {
            LrvMethod::Dk => dk_hac(y, None, false),
            LrvMethod::DkPw => dk_hac(y, None, true),
            LrvMethod::A91 => andrews91(y, false),
            LrvMethod::A91Pw => andrews91(y, true),
            LrvMethod::Nw87 => nw87(y),
            LrvMethod::Kvb => kvb(y),
            LrvMethod::Ewc(b) => ewc(y, b.unwrap_or_else(|| ewc_default_b(y.len()))),
            LrvMethod::Hac(k, b1) => hac(y, k, b1, true),
        }
    }
}
