//! Double-kernel HAC with plug-in bandwidths.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hac::{ar1_fit, clip_prewhitening};
use super::LrvEstimate;
use crate::error::{numeric, Error, Result};
use crate::kernels::{LagKernel, SmoothingKernel};
use crate::scalar::{compensated_sum, Real};
use crate::sls_models::TimeSeries;
use crate::spectral::{kernel_local_acf, kernel_local_mean, AcfEstimate, AcfMethod};

/// Data-driven tuning for the DK-HAC estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DkBandwidths {
    pub b1: f64,
    pub b2_bar: f64,
    /// `b̂_2(r n_T/T)` for blocks `r = 1..=⌊T/n_T⌋`, stored at index `r − 1`.
    pub b2_local: Vec<f64>,
    pub phi2: f64,
    #[serde(rename = "n_T")]
    pub n_t: usize,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub b1_clamped: bool,
    pub b2_clamped_blocks: usize,
}

impl DkBandwidths {
    pub fn blocks(&self) -> usize {
        self.b2_local.len()
    }
}

const S_OMEGA: [f64; 9] = [
    -std::f64::consts::PI,
    -3.0,
    -2.0,
    -1.0,
    0.0,
    1.0,
    2.0,
    3.0,
    std::f64::consts::PI,
];

/// Reference-model curvature term `D̂_1(u)` built from the transfer function
/// `1 + 0.8(cos 1.5 + cos 4πu)e^{−iω}` averaged over a fixed frequency set.
pub fn d1_reference(u: f64) -> f64 {
    use std::f64::consts::PI;
    let a = 0.8 * (1.5f64.cos() + (4.0 * PI * u).cos());
    let da = 0.8 * (-4.0 * PI * (4.0 * PI * u).sin());
    let dda = 0.8 * (-16.0 * PI * PI * (4.0 * PI * u).cos());
    let mut acc = Complex64::new(0.0, 0.0);
    for &w in &S_OMEGA {
        let z = Complex64::from_polar(1.0, -w);
        let h = Complex64::new(1.0, 0.0) + a * z;
        let first = 3.0 / PI * h.powi(-4) * da * z;
        let second = 1.0 / PI * h.norm().powi(-3) * dda * z;
        acc += first - second;
    }
    let mean = acc / S_OMEGA.len() as f64;
    // The frequency set is symmetric, so the mean is real up to rounding.
    (mean * mean).re
}

/// `⌊T^{0.6}⌋`.
pub fn block_length(t_len: usize) -> usize {
    ((t_len as f64).powf(0.6) + 1e-9).floor() as usize
}

/// Plug-in bandwidths using the reference `D̂_1`.
pub fn dk_bandwidths<S: Real>(y: &TimeSeries<S>) -> Result<DkBandwidths> {
    dk_bandwidths_with(y, &d1_reference)
}

/// Plug-in bandwidths with a caller-supplied `D̂_1(u)`.
pub fn dk_bandwidths_with<S: Real>(y: &TimeSeries<S>, d1: &dyn Fn(f64) -> f64) -> Result<DkBandwidths> {
    let t_len = y.len();
    if t_len < 50 {
        return Err(Error::Domain(format!("T = {t_len} is below the minimum of 50")));
    }
    bandwidths_for(&y.demeaned(), d1)
}

fn bandwidths_for<S: Real>(v: &[S], d1: &dyn Fn(f64) -> f64) -> Result<DkBandwidths> {
    let t_len = v.len();
    let tf = t_len as f64;
    let n_t = block_length(t_len);
    let blocks = t_len / n_t;
    if blocks < 2 {
        return Err(Error::Domain(format!("T = {t_len} leaves fewer than two blocks of length {n_t}")));
    }
    let one = S::one();

    // Rolling AR(1) on trailing windows ending at t = j n_T + 1.
    let mut num_terms = Vec::new();
    let mut den_terms = Vec::new();
    for j in 1..blocks {
        let t = j * n_t + 1;
        let w = &v[t - n_t - 1..t];
        let a = ar1_fit(w)?;
        if (one - a).abs() < S::lit(1e-12) {
            return numeric(format!("phi2: rolling AR(1) coefficient equals one in window ending at t = {t}"));
        }
        let s2 = (1..w.len()).map(|i| (w[i] - a * w[i - 1]).powi(2)).sum::<S>();
        num_terms.push(s2 * a * a / (one - a).powi(4));
        den_terms.push(s2 / (one - a).powi(2));
    }
    let scale = S::of(n_t) / S::of(t_len);
    let num = scale * compensated_sum(num_terms);
    let den = scale * compensated_sum(den_terms);
    if !(den > S::zero()) {
        return numeric("phi2: denominator is zero (no variation in the rolling windows)");
    }
    let phi2 = (S::lit(18.0) * num * num / (den * den)).to_f64_lossy();

    // D̂_2 uses a pilot smoothing bandwidth n_T/T on the standardized series.
    let var = v.iter().map(|&x| x * x).sum::<S>() / S::of(t_len);
    if !(var > S::zero()) {
        return numeric("D2: series has zero variance");
    }
    let sd = var.sqrt();
    let z: Vec<S> = v.iter().map(|&x| x / sd).collect();
    let l2 = (tf.powf(4.0 / 25.0) + 1e-9).floor() as usize;
    let pilot = S::of(n_t);
    let mut b2_local = Vec::with_capacity(blocks);
    let mut d1s = Vec::with_capacity(blocks);
    let mut d2s = Vec::with_capacity(blocks);
    let mut clamped = 0;
    for r in 1..=blocks {
        let mid = (r as f64 - 0.5) * n_t as f64;
        let u = mid / tf;
        let tu = S::lit(mid);
        let c = kernel_local_acf(&z, tu, pilot, SmoothingKernel::Quadratic, l2, S::zero());
        let mut d2 = c[0] * c[0];
        for &cl in &c[1..] {
            d2 = d2 + S::lit(2.0) * cl * cl;
        }
        let d2 = 2.0 * d2.to_f64_lossy();
        let d1v = d1(u);
        if !(d1v > 0.0) {
            return numeric(format!("D1({u}) = {d1v} is not positive"));
        }
        if !(d2 > 0.0) {
            return numeric(format!("D2({u}) = {d2} is not positive"));
        }
        let mut b2 = 1.6786 * d1v.powf(-0.2) * d2.powf(0.2) * tf.powf(-0.2);
        if b2 > 1.0 {
            b2 = 1.0;
            clamped += 1;
        }
        b2_local.push(b2);
        d1s.push(d1v);
        d2s.push(d2);
    }
    let b2_bar = (n_t as f64 / tf) * compensated_sum(b2_local[..blocks - 1].iter().copied());
    if !(phi2 > 0.0) {
        return numeric("phi2 is not positive");
    }
    let mut b1 = 0.6828 * (phi2 * tf * b2_bar).powf(-0.2);
    let b1_clamped = b1 > 1.0;
    if b1_clamped {
        b1 = 1.0;
    }
    Ok(DkBandwidths { b1, b2_bar, b2_local, phi2, n_t, d1: d1s, d2: d2s, b1_clamped, b2_clamped_blocks: clamped })
}

/// `(n_T/T) Σ_r ĉ_DK,T(r n_T/T, k)` for `k = 0..=max_lag`, one smoothing bandwidth per block.
pub fn dk_integrated_acf<S: Real>(
    y: &TimeSeries<S>,
    n_t: usize,
    b2_local: &[f64],
    k2: SmoothingKernel,
    max_lag: usize,
    demean: bool,
) -> Result<AcfEstimate<S>> {
    let t_len = y.len();
    if n_t == 0 || b2_local.len() != t_len / n_t {
        return Err(Error::Domain(format!(
            "expected {} block bandwidths for n_T = {n_t}, got {}",
            t_len / n_t.max(1),
            b2_local.len()
        )));
    }
    if let Some(b) = b2_local.iter().find(|&&b| !(b > 0.0 && b <= 1.0)) {
        return Err(Error::Domain(format!("b2 = {b} must lie in (0, 1]")));
    }
    let max_lag = max_lag.min(t_len - 1);
    let values = integrated(y.values(), n_t, b2_local, k2, max_lag, demean);
    Ok(AcfEstimate { lags: (0..=max_lag).collect(), values, demeaned: demean, method: AcfMethod::Dk, clamped_windows: 0 })
}

fn integrated<S: Real>(v: &[S], n_t: usize, b2_local: &[f64], k2: SmoothingKernel, max_lag: usize, demean: bool) -> Vec<S> {
    let block_acfs = block_local_acfs(v, n_t, b2_local, k2, max_lag, demean);
    let scale = S::of(n_t) / S::of(v.len());
    (0..=max_lag)
        .map(|k| scale * compensated_sum(block_acfs.iter().map(|c| c[k])))
        .collect()
}

fn block_local_acfs<S: Real>(v: &[S], n_t: usize, b2_local: &[f64], k2: SmoothingKernel, max_lag: usize, demean: bool) -> Vec<Vec<S>> {
    let tt = S::of(v.len());
    b2_local
        .iter()
        .enumerate()
        .map(|(i, &b2)| {
            // Block midpoint.
            let tu = S::lit((i as f64 + 0.5) * n_t as f64);
            let tb2 = tt * S::lit(b2);
            let m = if demean { kernel_local_mean(v, tu, tb2, k2) } else { S::zero() };
            // Windows cut off by the sample start are rescaled to unit mass.
            let mass = (1..=v.len()).map(|s| k2.eval((tu - S::of(s)) / tb2)).sum::<S>() / tb2;
            let scale = if mass > S::zero() { S::one() / mass } else { S::one() };
            kernel_local_acf(v, tu, tb2, k2, max_lag, m).into_iter().map(|c| c * scale).collect()
        })
        .collect()
}

fn qs_weighted<S: Real>(acf: &[S], b1: S) -> S {
    let mut total = acf[0];
    for (k, &g) in acf.iter().enumerate().skip(1) {
        total = total + S::lit(2.0) * LagKernel::Qs.eval(b1 * S::of(k)) * g;
    }
    total
}

/// DK-HAC: QS lag window over the block-integrated kernel-smoothed local autocovariances.
/// With `prewhiten`, each block is whitened by its own AR(1) fit and recolored
/// (an approximation reported as `dk-pw-approx`).
pub fn dk_hac<S: Real>(y: &TimeSeries<S>, bw: Option<&DkBandwidths>, prewhiten: bool) -> Result<LrvEstimate<S>> {
    let t_len = y.len();
    if t_len < 50 {
        return Err(Error::Domain(format!("T = {t_len} is below the minimum of 50")));
    }
    let v = y.demeaned();
    if !prewhiten {
        let owned;
        let bw = match bw {
            Some(b) => b,
            None => {
                owned = bandwidths_for(&v, &d1_reference)?;
                &owned
            }
        };
        // Products of globally demeaned residuals; local demeaning would annihilate the lag sum.
        let acf = integrated(&v, bw.n_t, &bw.b2_local, SmoothingKernel::Quadratic, t_len - 1, false);
        let value = qs_weighted(&acf, S::lit(bw.b1));
        return Ok(with_bandwidths(LrvEstimate::new(value, "dk", bw.b1), bw));
    }

    // Blockwise AR(1) whitening with a Prais–Winsten first observation.
    let n_t = block_length(t_len);
    let blocks = t_len / n_t;
    let mut rhos = Vec::with_capacity(blocks);
    let mut clipped = 0;
    for r in 0..blocks {
        let lo = r * n_t;
        let hi = if r + 1 == blocks { t_len } else { (r + 1) * n_t };
        let (rho, c) = clip_prewhitening(ar1_fit(&v[lo..hi])?.to_f64_lossy());
        clipped += c as usize;
        rhos.push(S::lit(rho));
    }
    let block_of = |t: usize| (t / n_t).min(blocks - 1);
    let mut e = Vec::with_capacity(t_len);
    e.push((S::one() - rhos[0] * rhos[0]).sqrt() * v[0]);
    for t in 1..t_len {
        e.push(v[t] - rhos[block_of(t)] * v[t - 1]);
    }
    let owned;
    let bw = match bw {
        Some(b) => b,
        None => {
            owned = bandwidths_for(&e, &d1_reference)?;
            &owned
        }
    };
    let b1 = S::lit(bw.b1);
    let locals = block_local_acfs(&e, bw.n_t, &bw.b2_local, SmoothingKernel::Quadratic, t_len - 1, false);
    let recolored = locals.iter().enumerate().map(|(i, acf)| {
                let rho = rhos[block_of(i * bw.n_t + bw.n_t / 2)];
        qs_weighted(acf, b1) / ((S::one() - rho) * (S::one() - rho))
    });
    let value = S::of(bw.n_t) / S::of(t_len) * compensated_sum(recolored);
    Ok(with_bandwidths(LrvEstimate::new(value, "dk-pw-approx", bw.b1), bw)
        .diag("pw_approx", 1.0)
        .diag("pw_blocks_clipped", clipped as f64))
}

fn with_bandwidths<S: Real>(mut est: LrvEstimate<S>, bw: &DkBandwidths) -> LrvEstimate<S> {
    est.b2 = Some(bw.b2_bar);
    est.n_t = Some(bw.n_t);
    est.diag("b1", bw.b1)
        .diag("b2_bar", bw.b2_bar)
        .diag("phi2", bw.phi2)
        .diag("n_T", bw.n_t as f64)
        .diag("b1_clamped", bw.b1_clamped as u8 as f64)
        .diag("b2_clamped_blocks", bw.b2_clamped_blocks as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_length_rule() {
        assert_eq!(block_length(200), 24);
        assert_eq!(block_length(400), 36);
        assert_eq!(block_length(1000), 63);
    }

    #[test]
    fn d1_matches_direct_evaluation() {
        // Independent evaluation: separate real and imaginary parts by hand.
        use std::f64::consts::PI;
        let u = 0.5f64;
        let a = 0.8 * (1.5f64.cos() + (4.0 * PI * u).cos());
        let c1 = 0.8 * (-4.0 * PI * (4.0 * PI * u).sin());
        let c2 = 0.8 * (-16.0 * PI * PI * (4.0 * PI * u).cos());
        let mut re = 0.0;
        let mut im = 0.0;
        for &w in &S_OMEGA {
            let (hr, hi) = (1.0 + a * w.cos(), -a * w.sin());
            let modsq = hr * hr + hi * hi;
            // (hr + i hi)^{-4} = conj(h)^4 / |h|^8
            let (cr, ci) = (hr, -hi);
            let (sr, si) = (cr * cr - ci * ci, 2.0 * cr * ci);
            let (qr, qi) = (sr * sr - si * si, 2.0 * sr * si);
            let (pr, pi_) = (qr / modsq.powi(4), qi / modsq.powi(4));
            let (zr, zi) = (w.cos(), -w.sin());
            let t1r = 3.0 / PI * c1 * (pr * zr - pi_ * zi);
            let t1i = 3.0 / PI * c1 * (pr * zi + pi_ * zr);
            let m3 = modsq.powf(-1.5);
            re += t1r - c2 / PI * m3 * zr;
            im += t1i - c2 / PI * m3 * zi;
        }
        re /= 9.0;
        im /= 9.0;
        assert!(im.abs() < 1e-10);
        assert!((d1_reference(u) - (re * re - im * im)).abs() < 1e-9 * d1_reference(u).abs().max(1.0));
        assert!(d1_reference(0.5) > 0.0);
    }

    #[test]
    fn bandwidths_are_scale_invariant() {
        let spec = crate::sls_models::builtin_spec("M2").unwrap().into_sls().unwrap();
        let y = crate::sls_models::simulate_path::<f64>(&spec, 200, 9).unwrap();
        let a = dk_bandwidths(&y).unwrap();
        let b = dk_bandwidths(&y.map(|x| 3.7 * x).unwrap()).unwrap();
        assert!((a.b1 - b.b1).abs() < 1e-12 * a.b1);
        for (x, z) in a.b2_local.iter().zip(&b.b2_local) {
            assert!((x - z).abs() < 1e-12 * x);
        }
        assert_eq!(a.n_t, 24);
        assert_eq!(a.blocks(), 8);
    }

    #[test]
    fn constant_series_is_a_numeric_error() {
        let y = TimeSeries::new(vec![1.0f64; 100]).unwrap();
        assert!(matches!(dk_bandwidths(&y), Err(Error::Numeric(_))));
    }
}
