use super::periodogram::half_spectrum;
use super::{AcfEstimate, AcfMethod, PeriodogramEstimate};
use crate::error::{Error, Result};
use crate::kernels::SmoothingKernel;
use crate::scalar::{compensated_sum, Real};
use crate::sls_models::TimeSeries;

/// `⌊T·u⌋`, robust to representation error in `u`.
pub fn center_index(t_len: usize, u: f64) -> i64 {
    (t_len as f64 * u + 1e-9).floor() as i64
}

fn check_even(name: &str, n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Domain(format!("{name} = {n} must be a positive even integer")));
    }
    Ok(())
}

/// Local autocovariance over a window of length `n2` centered at one-based index `c`.
fn local_autocov_at<S: Real>(v: &[S], c: i64, k: usize, n2: usize, demean: bool) -> Result<S> {
    let t_len = v.len() as i64;
    let half = (n2 / 2) as i64;
    let lead_off = (k / 2) as i64;
    let lag_off = k as i64 - lead_off;
    let lead_start = c + lead_off - half + 1;
    let lead_end = c + lead_off + half;
    let lag_start = c - lag_off - half + 1;
    if lag_start < 1 {
        return Err(Error::Boundary { index: lag_start, len: v.len() });
    }
    if lead_end > t_len {
        return Err(Error::Boundary { index: lead_end, len: v.len() });
    }
    let m = if demean {
        let lo = (c - half) as usize;
        v[lo..lo + n2].iter().copied().sum::<S>() / S::of(n2)
    } else {
        S::zero()
    };
    let a = &v[(lead_start - 1) as usize..(lead_start - 1) as usize + n2];
    let b = &v[(lag_start - 1) as usize..(lag_start - 1) as usize + n2];
    Ok(a.iter().zip(b).map(|(&x, &y)| (x - m) * (y - m)).sum::<S>() / S::of(n2))
}

/// Locally demeaned autocovariance `ĉ_T(u, k)` over a window of length `n2` centered at `⌊Tu⌋`.
pub fn local_autocov_hat<S: Real>(y: &TimeSeries<S>, u: f64, k: i64, n2: usize) -> Result<S> {
    local_autocov_hat_with(y, u, k, n2, true)
}

pub fn local_autocov_hat_with<S: Real>(y: &TimeSeries<S>, u: f64, k: i64, n2: usize, demean: bool) -> Result<S> {
    check_even("n2", n2)?;
    local_autocov_at(y.values(), center_index(y.len(), u), k.unsigned_abs() as usize, n2, demean)
}

/// `Γ̂_DK(k) = (n_T/T) Σ_{r=1}^{⌊T/n_T⌋} ĉ_T(r n_T/T, k)`. Windows that would
/// leave the sample are shifted inward; the tail block shorter than `n_T` is dropped.
pub fn dk_autocov<S: Real>(y: &TimeSeries<S>, max_lag: usize, n_t: usize, n2: usize) -> Result<AcfEstimate<S>> {
    check_even("n_T", n_t)?;
    check_even("n2", n2)?;
    let t_len = y.len();
    let blocks = t_len / n_t;
    if blocks == 0 {
        return Err(Error::Domain(format!("n_T = {n_t} exceeds T = {t_len}")));
    }
    if max_lag >= t_len {
        return Err(Error::Domain(format!("max_lag {max_lag} must be below T = {t_len}")));
    }
    let v = y.values();
    let half = (n2 / 2) as i64;
    let mut clamped = 0;
    let mut values = Vec::with_capacity(max_lag + 1);
    for k in 0..=max_lag {
        let lead_off = (k / 2) as i64;
        let lag_off = k as i64 - lead_off;
        let lo_c = lag_off + half;
        let hi_c = t_len as i64 - lead_off - half;
        if lo_c > hi_c {
            return Err(Error::Boundary { index: lo_c, len: t_len });
        }
        let mut terms = Vec::with_capacity(blocks);
        for r in 1..=blocks {
            let c = (r * n_t) as i64;
            let cc = c.clamp(lo_c, hi_c);
            if cc != c {
                clamped += 1;
            }
            terms.push(local_autocov_at(v, cc, k, n2, true)?);
        }
        values.push(S::of(n_t) / S::of(t_len) * compensated_sum(terms));
    }
    Ok(AcfEstimate {
        lags: (0..=max_lag).collect(),
        values,
        demeaned: true,
        method: AcfMethod::Dk,
        clamped_windows: clamped,
    })
}

/// `K_2`-weighted mean of `V_s` with weights `K_2((Tu − s)/(T b_2))`.
pub(crate) fn kernel_local_mean<S: Real>(v: &[S], tu: S, tb2: S, k2: SmoothingKernel) -> S {
    let (lo, hi) = index_range(tu - tb2, tu, 1, v.len());
    let mut num = S::zero();
    let mut den = S::zero();
    for s in lo..=hi {
        let w = k2.eval((tu - S::of(s)) / tb2);
        num = num + w * v[s - 1];
        den = den + w;
    }
    if den > S::zero() {
        num / den
    } else {
        S::zero()
    }
}

fn index_range<S: Real>(from: S, to: S, min: usize, max: usize) -> (usize, usize) {
    let lo = from.floor().to_f64_lossy() - 1.0;
    let hi = to.ceil().to_f64_lossy() + 1.0;
    let lo = if lo < min as f64 { min } else { lo as usize };
    let hi = if hi > max as f64 { max } else { hi.max(0.0) as usize };
    (lo, hi)
}

/// `(T b_2)^{−1} Σ_s K_2((Tu − (s − k/2))/(T b_2)) (V_s − m)(V_{s−k} − m)` for `k = 0..=max_lag`.
pub(crate) fn kernel_local_acf<S: Real>(v: &[S], tu: S, tb2: S, k2: SmoothingKernel, max_lag: usize, m: S) -> Vec<S> {
    let t_len = v.len();
    let half = S::lit(0.5);
    (0..=max_lag.min(t_len - 1))
        .map(|k| {
            let kh = S::of(k) * half;
            let (lo, hi) = index_range(tu + kh - tb2, tu + kh, k + 1, t_len);
            let mut acc = S::zero();
            for s in lo..=hi {
                let w = k2.eval((tu - (S::of(s) - kh)) / tb2);
                if w != S::zero() {
                    acc = acc + w * (v[s - 1] - m) * (v[s - 1 - k] - m);
                }
            }
            acc / tb2
        })
        .collect()
}

/// Kernel-smoothed local autocovariance `ĉ_DK,T(u, k)` after removing the `K_2`-weighted local mean.
pub fn dk_autocov_kernel<S: Real>(y: &TimeSeries<S>, k: i64, u: f64, b2: f64, k2: SmoothingKernel) -> Result<S> {
    dk_autocov_kernel_with(y, k, u, b2, k2, true)
}

pub fn dk_autocov_kernel_with<S: Real>(
    y: &TimeSeries<S>,
    k: i64,
    u: f64,
    b2: f64,
    k2: SmoothingKernel,
    demean: bool,
) -> Result<S> {
    if !(b2 > 0.0 && b2 <= 1.0) {
        return Err(Error::Domain(format!("b2 = {b2} must lie in (0, 1]")));
    }
    let v = y.values();
    let k = k.unsigned_abs() as usize;
    if k >= v.len() {
        return Ok(S::zero());
    }
    let tt = S::of(v.len());
    let tu = tt * S::lit(u);
    let tb2 = tt * S::lit(b2);
    let m = if demean { kernel_local_mean(v, tu, tb2, k2) } else { S::zero() };
    let all = kernel_local_acf(v, tu, tb2, k2, k, m);
    Ok(all[k])
}

/// Periodogram of the length-`n_T` segment centered at `⌊Tu⌋`.
pub fn local_periodogram<S: Real>(y: &TimeSeries<S>, u: f64, n_t: usize) -> Result<PeriodogramEstimate<S>> {
    if n_t < 2 {
        return Err(Error::Domain(format!("n_T = {n_t} must be at least 2")));
    }
    let c = center_index(y.len(), u);
    let start = c - (n_t / 2) as i64 + 1;
    let end = start + n_t as i64 - 1;
    if start < 1 {
        return Err(Error::Boundary { index: start, len: y.len() });
    }
    if end > y.len() as i64 {
        return Err(Error::Boundary { index: end, len: y.len() });
    }
    let seg = &y.values()[(start - 1) as usize..end as usize];
    let (frequencies, ordinates) = half_spectrum(seg);
    Ok(PeriodogramEstimate { frequencies, ordinates, window: Some((u, n_t)) })
}
