//! Segmented locally stationary data-generating processes.
//!
//! Each regime carries a tvAR(1) with mean `μ_j(u)`, AR coefficient `ρ(u)`
//! and innovation standard deviation `σ(u)`. Regime `j` covers the time
//! points `t ∈ (⌊Tλ_{j−1}⌋, ⌊Tλ_j⌋]`.

mod builtin;
mod oracle;
mod param;
mod series;
mod simulate;

pub use builtin::{builtin_spec, BuiltinModel, DmSpecification, BUILTIN_SPEC_NAMES};
pub use oracle::{
    d_star_true, expected_regime_means, gamma_stationary_approx, local_autocov_closed_form,
    local_autocov_quadrature, local_autocov_true, local_spectrum, theoretical_gamma,
    theoretical_gamma_with,
};
pub use param::ParamFn;
pub use series::TimeSeries;
pub(crate) use series::csv_err;
pub use simulate::{mad_scale, median, outlier_floor, simulate_path, simulate_path_with};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// AR start-up rule for `V_1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Draw from the stationary law frozen at `u = 1/T`.
    #[default]
    Stationary,
    /// Start the AR recursion from zero, so `V_1 − μ = σ(1/T) ε_1`.
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub mean: ParamFn,
    pub ar: ParamFn,
    /// Innovation standard deviation.
    pub sigma: ParamFn,
}

impl RegimeSpec {
    pub fn fraction(&self) -> f64 {
        self.lambda_hi - self.lambda_lo
    }
}

/// Outliers drawn as `Uniform(lo_mult·c, hi_mult·c)` with `c` the scaled MAD of the clean path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutlierRule {
    pub positions: Vec<f64>,
    #[serde(default = "default_scale_rule")]
    pub scale_rule: String,
    pub lo_mult: f64,
    pub hi_mult: f64,
}

fn default_scale_rule() -> String {
    "mad-uniform".to_string()
}

impl OutlierRule {
    /// One-based time indices `⌊T·p⌋` of the outliers.
    pub fn indices(&self, t_len: usize) -> Vec<usize> {
        self.positions
            .iter()
            .map(|&p| ((t_len as f64 * p).floor() as usize).clamp(1, t_len))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlsSpec {
    #[serde(default)]
    pub label: String,
    pub regimes: Vec<RegimeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outliers: Option<OutlierRule>,
}

impl SlsSpec {
    /// Single regime on `(0, 1]`.
    pub fn single(label: &str, mean: ParamFn, ar: ParamFn, sigma: ParamFn) -> Self {
        SlsSpec {
            label: label.to_string(),
            regimes: vec![RegimeSpec { lambda_lo: 0.0, lambda_hi: 1.0, mean, ar, sigma }],
            outliers: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SlsSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Interior break fractions `λ_1 < … < λ_m`.
    pub fn break_fractions(&self) -> Vec<f64> {
        self.regimes.iter().skip(1).map(|r| r.lambda_lo).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let spec_err = |m: String| Err(Error::Spec(m));
        if self.regimes.is_empty() {
            return spec_err("at least one regime is required".into());
        }
        if self.regimes[0].lambda_lo != 0.0 {
            return spec_err("first regime must start at 0".into());
        }
        if self.regimes.last().map(|r| r.lambda_hi) != Some(1.0) {
            return spec_err("last regime must end at 1".into());
        }
        for (j, r) in self.regimes.iter().enumerate() {
            if !(r.lambda_lo < r.lambda_hi) {
                return spec_err(format!("regime {}: lambda_lo must be below lambda_hi", j + 1));
            }
            if j > 0 && self.regimes[j - 1].lambda_hi != r.lambda_lo {
                return spec_err(format!("regime {} does not start where regime {} ends", j + 1, j));
            }
            for i in 0..=100 {
                let u = r.lambda_lo + (r.lambda_hi - r.lambda_lo) * (i.max(1) as f64) / 100.0;
                let rho: f64 = r.ar.eval(u);
                let sigma: f64 = r.sigma.eval(u);
                let mu: f64 = r.mean.eval(u);
                if !(rho.abs() < 1.0) {
                    return spec_err(format!("regime {}: |ar({u})| = {} is not below 1", j + 1, rho.abs()));
                }
                if !(sigma > 0.0) || !sigma.is_finite() {
                    return spec_err(format!("regime {}: sigma({u}) = {sigma} is not positive", j + 1));
                }
                if !mu.is_finite() {
                    return spec_err(format!("regime {}: mean({u}) is not finite", j + 1));
                }
            }
        }
        if let Some(o) = &self.outliers {
            if o.scale_rule != "mad-uniform" {
                return spec_err(format!("unknown outlier scale rule `{}`", o.scale_rule));
            }
            if !(o.lo_mult < o.hi_mult) {
                return spec_err("outlier lo_mult must be below hi_mult".into());
            }
            if o.positions.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
                return spec_err("outlier positions must lie in (0, 1)".into());
            }
        }
        Ok(())
    }

    /// Index of the regime containing time point `t` (one-based) for sample size `t_len`.
    pub fn regime_of_t(&self, t: usize, t_len: usize) -> usize {
        for (j, r) in self.regimes.iter().enumerate() {
            if t <= (t_len as f64 * r.lambda_hi).floor() as usize {
                return j;
            }
        }
        self.regimes.len() - 1
    }

    /// Index of the regime containing `u ∈ (0, 1]` under the `(lo, hi]` convention.
    pub fn regime_of_u(&self, u: f64) -> Result<usize> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::Domain(format!("u = {u} is outside (0, 1]")));
        }
        Ok(self.regimes.iter().position(|r| u <= r.lambda_hi).unwrap_or(self.regimes.len() - 1))
    }

    /// `(μ, ρ, σ)` at `u` within regime `j`.
    pub fn coefficients<S: Real>(&self, j: usize, u: S) -> (S, S, S) {
        let r = &self.regimes[j];
        (r.mean.eval(u), r.ar.eval(u), r.sigma.eval(u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_lookup_follows_floor_convention() {
        let spec = builtin_spec("M1").unwrap().into_sls().unwrap();
        assert_eq!(spec.regime_of_t(20, 200), 0);
        assert_eq!(spec.regime_of_t(21, 200), 1);
        assert_eq!(spec.regime_of_u(0.1).unwrap(), 0);
        assert_eq!(spec.regime_of_u(0.1000001).unwrap(), 1);
        assert!(spec.regime_of_u(0.0).is_err());
    }

    #[test]
    fn validation_catches_gaps_and_bad_coefficients() {
        let mut spec = builtin_spec("M1").unwrap().into_sls().unwrap();
        spec.regimes[1].lambda_lo = 0.2;
        assert!(matches!(spec.validate(), Err(Error::Spec(_))));
        let bad = SlsSpec::single("x", ParamFn::constant(0.0), ParamFn::constant(1.0), ParamFn::constant(1.0));
        assert!(bad.validate().is_err());
        let bad = SlsSpec::single("x", ParamFn::constant(0.0), ParamFn::constant(0.0), ParamFn::constant(0.0));
        assert!(bad.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        for name in ["M1", "M2", "M3", "M4"] {
            let spec = builtin_spec(name).unwrap().into_sls().unwrap();
            let back = SlsSpec::from_json(&spec.to_json()).unwrap();
            assert_eq!(spec, back);
        }
        let err = SlsSpec::from_json("{\"regimes\": [ {\"lambda_lo\": 0 }").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }
}
