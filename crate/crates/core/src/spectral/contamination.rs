use serde::{Deserialize, Serialize};

use super::{sample_autocov, AcfEstimate};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sls_models::TimeSeries;

/// `½ Σ_{j1≠j2} r_{j1} r_{j2} (m_{j2} − m_{j1})²`.
pub fn contamination_term<S: Real>(fractions: &[S], means: &[S]) -> S {
    let mut d = S::zero();
    for i in 0..means.len() {
        for j in (i + 1)..means.len() {
            let gap = means[j] - means[i];
            d = d + fractions[i] * fractions[j] * gap * gap;
        }
    }
    d
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeSummary {
    pub lo: f64,
    pub hi: f64,
    pub mean: f64,
}

/// Plug-in contamination estimate and the corrected autocovariances.
#[derive(Clone, Debug, PartialEq)]
pub struct ContaminationReport<S> {
    pub d_hat: S,
    pub regime_means: Vec<S>,
    pub regime_fractions: Vec<S>,
    pub regime_bounds: Vec<(f64, f64)>,
    /// `Γ̂(k) − d̂*`.
    pub corrected_acf: AcfEstimate<S>,
}

impl<S: Real> ContaminationReport<S> {
    pub fn to_json(&self) -> serde_json::Value {
        let regimes: Vec<RegimeSummary> = self
            .regime_bounds
            .iter()
            .zip(&self.regime_means)
            .map(|(&(lo, hi), m)| RegimeSummary { lo, hi, mean: m.to_f64_lossy() })
            .collect();
        serde_json::json!({
            "d_hat": self.d_hat.to_f64_lossy(),
            "regimes": regimes,
            "corrected_acf": self.corrected_acf.values.iter().map(|v| v.to_f64_lossy()).collect::<Vec<_>>(),
        })
    }
}

/// Regime sample means `V̄_j` under the break fractions, `d̂*`, and `Γ̂(k) − d̂*` for `k = 0..=max_lag`.
pub fn d_star_hat<S: Real>(y: &TimeSeries<S>, break_fractions: &[f64], max_lag: usize) -> Result<ContaminationReport<S>> {
    let t_len = y.len();
    let mut edges = vec![0.0];
    for (i, &b) in break_fractions.iter().enumerate() {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::Domain(format!("break fraction {b} must lie in (0, 1)")));
        }
        if i > 0 && b <= break_fractions[i - 1] {
            return Err(Error::Domain("break fractions must be strictly increasing".into()));
        }
        edges.push(b);
    }
    edges.push(1.0);
    let v = y.values();
    let mut means = Vec::new();
    let mut fractions = Vec::new();
    let mut bounds = Vec::new();
    for w in edges.windows(2) {
        let a = (t_len as f64 * w[0] + 1e-9).floor() as usize;
        let b = (t_len as f64 * w[1] + 1e-9).floor() as usize;
        if b <= a {
            return Err(Error::Domain(format!("regime ({}, {}] contains no observations", w[0], w[1])));
        }
        means.push(crate::scalar::mean(&v[a..b]));
        fractions.push(S::lit(w[1] - w[0]));
        bounds.push((w[0], w[1]));
    }
    let d_hat = contamination_term(&fractions, &means);
    let mut corrected_acf = sample_autocov(y, max_lag, true)?;
    for x in corrected_acf.values.iter_mut() {
        *x = *x - d_hat;
    }
    Ok(ContaminationReport { d_hat, regime_means: means, regime_fractions: fractions, regime_bounds: bounds, corrected_acf })
}

/// Share `γ` of a length-`n2` window centered at `⌊Tu⌋` lying at or before the
/// break `⌊Tλ⌋`, or `None` when the break is outside the window.
pub fn break_share(t_len: usize, u: f64, n2: usize, lambda: f64) -> Option<f64> {
    let c = super::center_index(t_len, u);
    let start = c - (n2 / 2) as i64 + 1;
    let end = start + n2 as i64 - 1;
    let tb = (t_len as f64 * lambda + 1e-9).floor() as i64;
    if tb < start || tb >= end {
        return None;
    }
    Some((tb - start + 1) as f64 / n2 as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_break_leaves_acf_unchanged() {
        let y = TimeSeries::new((0..50).map(|i| (i as f64 * 0.7).sin()).collect()).unwrap();
        let r = d_star_hat(&y, &[], 5).unwrap();
        assert_eq!(r.d_hat, 0.0);
        assert_eq!(r.corrected_acf.values, sample_autocov(&y, 5, true).unwrap().values);
    }

    #[test]
    fn two_regime_formula() {
        let d: f64 = contamination_term(&[0.1, 0.9], &[1.27, -0.03]);
        assert!((d - 0.1521).abs() < 1e-12);
        let mut v = vec![1.0; 10];
        v.extend(vec![-1.0; 90]);
        let r = d_star_hat::<f64>(&TimeSeries::new(v).unwrap(), &[0.1], 0).unwrap();
        assert!((r.d_hat - 0.1 * 0.9 * 4.0).abs() < 1e-12);
        let sum: f64 = r.regime_fractions.iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
        let json = r.to_json();
        assert_eq!(json["regimes"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn invalid_breaks() {
        let y = TimeSeries::new(vec![0.0f64; 10]).unwrap();
        assert!(d_star_hat(&y, &[0.0], 1).is_err());
        assert!(d_star_hat(&y, &[0.5, 0.4], 1).is_err());
        assert!(d_star_hat(&y, &[0.51, 0.55], 1).is_err());
    }

    #[test]
    fn break_share_in_window() {
        assert_eq!(break_share(200, 0.5, 20, 0.5), Some(0.5));
        assert_eq!(break_share(200, 0.2, 20, 0.5), None);
    }
}
