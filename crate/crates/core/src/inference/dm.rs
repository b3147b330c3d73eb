//! Equal-predictive-ability test and the fixed-scheme forecasting harness.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{critical_value, has_variation, p_value, studentize, InferenceConfig, TestResult};
use crate::error::{Error, Result};
use crate::lrv::{LrvMethod, Reference};
use crate::rng::rng_from_seed;
use crate::scalar::Real;
use crate::sls_models::{outlier_floor, DmSpecification, TimeSeries};

const ERROR_AR: f64 = 0.3;

/// Forecast-comparison design. Target `y_t = 1 + x⁽⁰⁾_{t−1} + e_t`, `e_t = 0.3e_{t−1} + u_t`.
/// Under the null both predictors are independent `N(1,1)` noise; under the
/// alternative the first is `x⁽⁰⁾ + noise` and the second is a noisier proxy
/// whose signal is replaced by the specification's level on its window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmDesign {
    #[serde(rename = "T")]
    pub t_len: usize,
    pub split: f64,
    pub horizon: usize,
    pub specification: DmSpecification,
    pub delta: f64,
    pub null: bool,
}

impl DmDesign {
    pub fn alternative(t_len: usize, specification: DmSpecification, delta: f64) -> Self {
        DmDesign { t_len, split: 0.5, horizon: 1, specification, delta, null: false }
    }

    pub fn null(t_len: usize, specification: DmSpecification) -> Self {
        DmDesign { t_len, split: 0.5, horizon: 1, specification, delta: 0.0, null: true }
    }

    fn in_sample_end(&self) -> usize {
        (self.t_len as f64 * self.split).floor() as usize
    }

    /// Number of out-of-sample losses `T_n`.
    pub fn n_losses(&self) -> usize {
        (self.t_len - self.horizon).saturating_sub(self.in_sample_end())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::Domain(format!("split = {} must lie in (0, 1)", self.split)));
        }
        if self.horizon < 1 {
            return Err(Error::Domain("horizon must be at least 1".into()));
        }
        let (s, e) = self.specification.window(self.t_len.max(64));
        if self.t_len < 64 || e > self.t_len || s < 1 {
            return Err(Error::Domain(format!("T = {} is too short for the design", self.t_len)));
        }
        if self.in_sample_end() <= self.horizon + 2 || self.n_losses() < 2 {
            return Err(Error::Domain("split leaves too few in-sample or out-of-sample points".into()));
        }
        Ok(())
    }
}

fn ols(y: &[f64], x: &[f64]) -> Result<(f64, f64)> {
    let n = y.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 1e-12 * n) {
        return Err(Error::Numeric("singular regressor matrix in forecast model".into()));
    }
    let b = sxy / sxx;
    Ok((my - b * mx, b))
}

/// Simulates one design draw and returns the out-of-sample quadratic losses
/// `(L⁽¹⁾_t, L⁽²⁾_t)` for forecast origins `t = ⌊T·split⌋+1, …, T−τ`.
pub fn dm_forecast_harness<S: Real>(design: &DmDesign, seed: u64) -> Result<(Vec<S>, Vec<S>)> {
    design.validate()?;
    let t_len = design.t_len;
    let h = design.horizon;
    let mut rng = rng_from_seed(seed);
    let mut normals = |n: usize| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(&mut rng)).collect() };
    // Index 0..=T; index 0 is the pre-sample value.
    let x0: Vec<f64> = normals(t_len + 1).into_iter().map(|v| 1.0 + v).collect();
    let z = normals(t_len + 1);
    let u1 = normals(t_len + 1);
    let u2 = normals(t_len + 1);
    let ue = normals(t_len + 1);
    let mut e = vec![ue[0] / (1.0 - ERROR_AR * ERROR_AR).sqrt(); t_len + 1];
    for t in 1..=t_len {
        e[t] = ERROR_AR * e[t - 1] + ue[t];
    }
    let y: Vec<f64> = (0..=t_len).map(|t| if t == 0 { f64::NAN } else { 1.0 + x0[t - 1] + e[t] }).collect();

    let (x1, mut x2): (Vec<f64>, Vec<f64>) = if design.null {
        ((0..=t_len).map(|t| 1.0 + u1[t]).collect(), (0..=t_len).map(|t| 1.0 + u2[t]).collect())
    } else {
        let spec = design.specification;
        let (ws, we) = spec.window(t_len);
        let x1 = (0..=t_len).map(|t| x0[t] + u1[t]).collect();
        let x2 = (0..=t_len)
            .map(|t| {
                let signal = if t >= ws && t <= we { spec.level(t, t_len, design.delta) } else { x0[t] };
                signal + 0.2 * z[t] + 2.0 * u2[t]
            })
            .collect();
        (x1, x2)
    };
    if !design.null {
        let times = design.specification.outlier_times(t_len);
        if !times.is_empty() {
            let c = outlier_floor(&x2[1..]).abs();
            let (lo, hi) = design.specification.outlier_multipliers();
            for t in times {
                let w: f64 = rng.random();
                x2[t] = lo * c + (hi - lo) * c * w;
            }
        }
    }

    let end = design.in_sample_end();
    let fit = |x: &[f64]| -> Result<(f64, f64)> {
        let ys: Vec<f64> = (h..=end).map(|t| y[t]).collect();
        let xs: Vec<f64> = (h..=end).map(|t| x[t - h]).collect();
        ols(&ys, &xs)
    };
    let (a1, b1) = fit(&x1)?;
    let (a2, b2) = fit(&x2)?;
    let mut l1 = Vec::with_capacity(design.n_losses());
    let mut l2 = Vec::with_capacity(design.n_losses());
    for t in (end + 1)..=(t_len - h) {
        let target = y[t + h];
        l1.push(S::lit((target - a1 - b1 * x1[t]).powi(2)));
        l2.push(S::lit((target - a2 - b2 * x2[t]).powi(2)));
    }
    Ok((l1, l2))
}

/// `T_n^{1/2} d̄/√Ĵ_d` with `d_t = L⁽²⁾_t − L⁽¹⁾_t`.
pub fn dm_test<S: Real>(losses_1: &[S], losses_2: &[S], method: LrvMethod, level: f64) -> Result<TestResult<S>> {
    dm_test_with(losses_1, losses_2, method, level, &InferenceConfig::default())
}

pub fn dm_test_with<S: Real>(
    losses_1: &[S],
    losses_2: &[S],
    method: LrvMethod,
    level: f64,
    cfg: &InferenceConfig,
) -> Result<TestResult<S>> {
    if losses_1.len() != losses_2.len() {
        return Err(Error::Domain(format!(
            "loss series lengths differ: {} vs {}",
            losses_1.len(),
            losses_2.len()
        )));
    }
    if losses_1.len() < 20 {
        return Err(Error::Domain(format!("T_n = {} is below the minimum of 20", losses_1.len())));
    }
    let d: Vec<S> = losses_2.iter().zip(losses_1).map(|(&b, &a)| b - a).collect();
    if !has_variation(&d) {
        return Err(Error::DegenerateVariance(0.0));
    }
    let d = TimeSeries::new(d)?;
    let reference = dm_reference(method, d.len(), cfg);
    let cv = critical_value(reference, level, &cfg.fixed_b)?;
    let lrv = method.estimate(&d)?;
    let statistic = studentize(d.mean(), d.len(), lrv.value)?;
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

pub(crate) fn dm_reference(method: LrvMethod, n: usize, cfg: &InferenceConfig) -> Reference {
    match method {
        LrvMethod::Kvb => cfg.dm_kvb_reference,
        m => m.reference(n),
    }
}
