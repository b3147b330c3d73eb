use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{AcfEstimate, AcfMethod};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sls_models::TimeSeries;

/// `Γ̂(k) = T^{−1} Σ_{t=k+1}^T (V_t − V̄)(V_{t−k} − V̄)` for `k = 0..=max_lag`.
pub fn sample_autocov<S: Real>(y: &TimeSeries<S>, max_lag: usize, demean: bool) -> Result<AcfEstimate<S>> {
    let t_len = y.len();
    if max_lag >= t_len {
        return Err(Error::Domain(format!("max_lag {max_lag} must be below T = {t_len}")));
    }
    let v = if demean { y.demeaned() } else { y.values().to_vec() };
    Ok(AcfEstimate {
        lags: (0..=max_lag).collect(),
        values: autocov_lags(&v, max_lag),
        demeaned: demean,
        method: AcfMethod::Global,
        clamped_windows: 0,
    })
}

/// Direct lag sums with divisor `T`, switching to the FFT route for long inputs.
pub(crate) fn autocov_lags<S: Real>(v: &[S], max_lag: usize) -> Vec<S> {
    let t_len = v.len();
    if t_len.saturating_mul(max_lag + 1) > (1 << 20) {
        let mut all = autocov_all(v);
        all.truncate(max_lag + 1);
        return all;
    }
    let tt = S::of(t_len);
    (0..=max_lag)
        .map(|k| v[k..].iter().zip(v).map(|(&a, &b)| a * b).sum::<S>() / tt)
        .collect()
}

/// All `T` autocovariances of `v` (not re-centered) in `O(T log T)`.
pub fn autocov_all<S: Real>(v: &[S]) -> Vec<S> {
    let t_len = v.len();
    let n = (2 * t_len).next_power_of_two();
    let mut planner = FftPlanner::<S>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex<S>> = v.iter().map(|&x| Complex::new(x, S::zero())).collect();
    buf.resize(n, Complex::new(S::zero(), S::zero()));
    fwd.process(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex::new(z.norm_sqr(), S::zero());
    }
    inv.process(&mut buf);
    let scale = S::of(n) * S::of(t_len);
    buf.iter().take(t_len).map(|z| z.re / scale).collect()
}
