use super::LrvEstimate;
use crate::error::{numeric, Error, Result};
use crate::kernels::LagKernel;
use crate::scalar::Real;
use crate::sls_models::TimeSeries;
use crate::spectral::autocov_lags;

/// Bound on the prewhitening AR coefficient.
pub const PREWHITEN_BOUND: f64 = 0.97;

/// `Σ_{|k|<T} K(b1·k) Γ̂(k)` for an already centered (or deliberately raw) sequence.
pub(crate) fn hac_sum<S: Real>(v: &[S], kernel: LagKernel, b1: S) -> S {
    let t_len = v.len();
    let max_lag = if b1.is_finite() { kernel.support(b1, t_len) } else { 0 };
    let acf = autocov_lags(v, max_lag);
    let mut total = acf[0];
    for (k, &g) in acf.iter().enumerate().skip(1) {
        total = total + S::lit(2.0) * kernel.eval(b1 * S::of(k)) * g;
    }
    total
}

/// Kernel HAC estimator at bandwidth `b1`.
pub fn hac<S: Real>(y: &TimeSeries<S>, kernel: LagKernel, b1: f64, demean: bool) -> Result<LrvEstimate<S>> {
    if !(b1 > 0.0) {
        return Err(Error::Domain(format!("bandwidth b1 = {b1} must be positive")));
    }
    let v = if demean { y.demeaned() } else { y.values().to_vec() };
    let value = hac_sum(&v, kernel, S::lit(b1));
    Ok(LrvEstimate::new(value, &format!("hac-{}", kernel.name()), b1).diag("demeaned", demean as u8 as f64))
}

/// Bartlett HAC with `b1 = 1/(0.75 T^{1/3})`.
pub fn nw87<S: Real>(y: &TimeSeries<S>) -> Result<LrvEstimate<S>> {
    let t_len = y.len();
    if t_len < 8 {
        return Err(Error::Domain(format!("T = {t_len} is below the minimum of 8")));
    }
    let m = 0.75 * (t_len as f64).cbrt();
    let mut est = hac(y, LagKernel::Bartlett, 1.0 / m, true)?;
    est.method = "nw87".into();
    Ok(est.diag("lags", m.floor()))
}

/// OLS AR(1) coefficient `Σ v_t v_{t−1} / Σ v_{t−1}²`.
pub fn ar1_fit<S: Real>(v: &[S]) -> Result<S> {
    let mut num = S::zero();
    let mut den = S::zero();
    for t in 1..v.len() {
        num = num + v[t] * v[t - 1];
        den = den + v[t - 1] * v[t - 1];
    }
    if !(den > S::zero()) {
        return numeric("degenerate AR(1) fit: lagged regressor has zero variance");
    }
    Ok(num / den)
}

/// Clips an AR coefficient to `[−0.97, 0.97]`, reporting whether it moved.
pub fn clip_prewhitening(rho: f64) -> (f64, bool) {
    let c = rho.clamp(-PREWHITEN_BOUND, PREWHITEN_BOUND);
    (c, c != rho)
}

/// AR(1) plug-in QS bandwidth `S_T = 1.3221 (α̂(2) T)^{1/5}` with `α̂(2) = 4ρ̂²/(1−ρ̂)⁴`.
fn qs_plugin<S: Real>(v: &[S]) -> Result<(S, S, S)> {
    let rho = ar1_fit(v)?;
    let one = S::one();
    let alpha = S::lit(4.0) * rho * rho / (one - rho).powi(4);
    if !alpha.is_finite() {
        return numeric("AR(1) plug-in: alpha(2) is not finite (unit root fit)");
    }
    let st = S::lit(1.3221) * (alpha * S::of(v.len())).powf(S::lit(0.2));
    Ok((rho, alpha, st))
}

/// QS HAC with the AR(1) plug-in bandwidth, optionally with AR(1) prewhitening and recoloring.
pub fn andrews91<S: Real>(y: &TimeSeries<S>, prewhiten: bool) -> Result<LrvEstimate<S>> {
    let t_len = y.len();
    if t_len < 20 {
        return Err(Error::Domain(format!("T = {t_len} is below the minimum of 20")));
    }
    let v = y.demeaned();
    if !prewhiten {
        let (rho, alpha, st) = qs_plugin(&v)?;
        let b1 = S::one() / st;
        let value = hac_sum(&v, LagKernel::Qs, b1);
        return Ok(LrvEstimate::new(value, "a91", b1.to_f64_lossy())
            .diag("ar1", rho.to_f64_lossy())
            .diag("alpha2", alpha.to_f64_lossy())
            .diag("bandwidth", st.to_f64_lossy()));
    }
    let raw = ar1_fit(&v)?.to_f64_lossy();
    let (rho, clipped) = clip_prewhitening(raw);
    let r = S::lit(rho);
    let e: Vec<S> = (1..t_len).map(|t| v[t] - r * v[t - 1]).collect();
    let (rho_e, alpha, st) = qs_plugin(&e)?;
    let b1 = S::one() / st;
    let inner = hac_sum(&e, LagKernel::Qs, b1);
    let value = inner / ((S::one() - r) * (S::one() - r));
    Ok(LrvEstimate::new(value, "a91-pw", b1.to_f64_lossy())
        .diag("pw_coefficient", rho)
        .diag("pw_coefficient_raw", raw)
        .diag("pw_clipped", clipped as u8 as f64)
        .diag("residual_ar1", rho_e.to_f64_lossy())
        .diag("alpha2", alpha.to_f64_lossy())
        .diag("bandwidth", st.to_f64_lossy()))
}

/// Full-bandwidth Bartlett estimator via partial sums: `(2/T²) Σ_{t<T} Ŝ_t²`.
pub fn kvb<S: Real>(y: &TimeSeries<S>) -> Result<LrvEstimate<S>> {
    let t_len = y.len();
    if t_len < 2 {
        return Err(Error::Domain("T must be at least 2".into()));
    }
    let v = y.demeaned();
    let value = kvb_partial_sums(&v);
    Ok(LrvEstimate::new(value, "kvb", 1.0 / t_len as f64))
}

pub(crate) fn kvb_partial_sums<S: Real>(v: &[S]) -> S {
    let t_len = v.len();
    let mut s = S::zero();
    let mut acc = S::zero();
    for &x in &v[..t_len - 1] {
        s = s + x;
        acc = acc + s * s;
    }
    let tt = S::of(t_len);
    S::lit(2.0) * acc / (tt * tt)
}
