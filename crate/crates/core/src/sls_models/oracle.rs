//! Analytic and numerical ground truth for tvAR(1) specifications.

use super::{Init, SlsSpec};
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::scalar::Real;

fn coeffs_at_u<S: Real>(spec: &SlsSpec, u: S) -> Result<(S, S, S)> {
    let j = spec.regime_of_u(u.to_f64_lossy())?;
    Ok(spec.coefficients(j, u))
}

/// Time-varying spectral density `σ²(u)/(2π)·|1 − ρ(u)e^{−iω}|^{−2}`.
pub fn local_spectrum<S: Real>(spec: &SlsSpec, u: S, omega: S) -> Result<S> {
    let (_, rho, sigma) = coeffs_at_u(spec, u)?;
    Ok(ar1_spectrum(rho, sigma, omega))
}

pub(crate) fn ar1_spectrum<S: Real>(rho: S, sigma: S, omega: S) -> S {
    let denom = S::one() + rho * rho - S::lit(2.0) * rho * omega.cos();
    sigma * sigma / (S::lit(2.0) * S::PI() * denom)
}

/// `σ²ρ^{|k|}/(1 − ρ²)`.
pub fn local_autocov_closed_form<S: Real>(spec: &SlsSpec, u: S, k: i64) -> Result<S> {
    let (_, rho, sigma) = coeffs_at_u(spec, u)?;
    Ok(sigma * sigma * rho.powi(k.unsigned_abs() as i32) / (S::one() - rho * rho))
}

/// `∫_{−π}^{π} e^{iωk} f(u, ω) dω` by adaptive quadrature.
pub fn local_autocov_quadrature<S: Real>(spec: &SlsSpec, u: S, k: i64) -> Result<S> {
    let (_, rho, sigma) = coeffs_at_u(spec, u)?;
    let kk = S::lit(k as f64);
    let tol = S::lit(1e-10).max(S::epsilon() * S::lit(1e3));
    integrate(|w: S| (kk * w).cos() * ar1_spectrum(rho, sigma, w), -S::PI(), S::PI(), tol)
}

/// Local autocovariance `c(u, k)`; the closed form is returned after it is
/// confirmed against quadrature.
pub fn local_autocov_true<S: Real>(spec: &SlsSpec, u: S, k: i64) -> Result<S> {
    let closed = local_autocov_closed_form(spec, u, k)?;
    let quad = local_autocov_quadrature(spec, u, k)?;
    let tol = S::lit(1e-8).max(S::epsilon() * S::lit(1e4) * closed.abs().max(S::one()));
    if (closed - quad).abs() > tol {
        return Err(Error::Numeric(format!(
            "quadrature {quad} disagrees with closed form {closed} at u = {u}, k = {k}"
        )));
    }
    Ok(closed)
}

struct Moments<S> {
    mu: Vec<S>,
    rho: Vec<S>,
    var: Vec<S>,
}

fn moments<S: Real>(spec: &SlsSpec, t_len: usize, init: Init) -> Moments<S> {
    let tt = S::of(t_len);
    let mut m = Moments { mu: Vec::with_capacity(t_len), rho: Vec::with_capacity(t_len), var: Vec::with_capacity(t_len) };
    for t in 1..=t_len {
        let (mu, rho, sigma) = spec.coefficients(spec.regime_of_t(t, t_len), S::of(t) / tt);
        let var = match (t, init) {
            (1, Init::Stationary) => sigma * sigma / (S::one() - rho * rho),
            (1, Init::Zero) => sigma * sigma,
            _ => rho * rho * m.var[t - 2] + sigma * sigma,
        };
        m.mu.push(mu);
        m.rho.push(rho);
        m.var.push(var);
    }
    m
}

/// `Γ_T(k) = T^{−1} Σ_{t=k+1}^T E(V_t V_{t−k})` by propagating second moments
/// through the AR recursion (stationary start). Outliers are not modelled.
pub fn theoretical_gamma<S: Real>(spec: &SlsSpec, t_len: usize, k: usize) -> Result<S> {
    theoretical_gamma_with(spec, t_len, k, Init::Stationary)
}

pub fn theoretical_gamma_with<S: Real>(spec: &SlsSpec, t_len: usize, k: usize, init: Init) -> Result<S> {
    spec.validate()?;
    if k >= t_len {
        return Err(Error::Domain(format!("lag {k} must be below T = {t_len}")));
    }
    let m = moments::<S>(spec, t_len, init);
    let mut total = S::zero();
    for t in (k + 1)..=t_len {
        // E(X_t X_{t−k}) = (Π_{i=t−k+1}^{t} ρ_i)·Var(X_{t−k})
        let prod = (t - k + 1..=t).fold(S::one(), |p, i| p * m.rho[i - 1]);
        total = total + m.mu[t - 1] * m.mu[t - k - 1] + prod * m.var[t - k - 1];
    }
    Ok(total / S::of(t_len))
}

/// Expected regime sample means `E(V̄_j)` at sample size `T`.
pub fn expected_regime_means<S: Real>(spec: &SlsSpec, t_len: usize) -> Vec<S> {
    let tt = S::of(t_len);
    let mut sums = vec![(S::zero(), 0usize); spec.regimes.len()];
    for t in 1..=t_len {
        let j = spec.regime_of_t(t, t_len);
        let mu = spec.regimes[j].mean.eval(S::of(t) / tt);
        sums[j].0 = sums[j].0 + mu;
        sums[j].1 += 1;
    }
    sums.into_iter()
        .map(|(s, n)| if n == 0 { S::nan() } else { s / S::of(n) })
        .collect()
}

/// Stationary approximation `Σ_j ∫_{λ_{j−1}}^{λ_j} (c(u,k) + μ_j(u)²) du`.
pub fn gamma_stationary_approx<S: Real>(spec: &SlsSpec, k: usize) -> Result<S> {
    spec.validate()?;
    let mut total = S::zero();
    for r in &spec.regimes {
        let f = |u: S| {
            let rho = r.ar.eval(u);
            let s = r.sigma.eval(u);
            let mu = r.mean.eval(u);
            s * s * rho.powi(k as i32) / (S::one() - rho * rho) + mu * mu
        };
        total = total + integrate(f, S::lit(r.lambda_lo), S::lit(r.lambda_hi), S::lit(1e-12).max(S::epsilon()))?;
    }
    Ok(total)
}

/// Contamination term `d* = ½ Σ_{j1≠j2} r_{j1} r_{j2} (μ̄_{j2} − μ̄_{j1})²`.
pub fn d_star_true<S: Real>(spec: &SlsSpec) -> Result<S> {
    spec.validate()?;
    let mut fr = Vec::new();
    let mut means = Vec::new();
    for r in &spec.regimes {
        let lo = S::lit(r.lambda_lo);
        let hi = S::lit(r.lambda_hi);
        let w = hi - lo;
        let int = integrate(|u: S| r.mean.eval(u), lo, hi, S::lit(1e-13).max(S::epsilon()))?;
        fr.push(w);
        means.push(int / w);
    }
    Ok(crate::spectral::contamination_term(&fr, &means))
}

#[cfg(test)]
mod tests {
    use super::super::{builtin_spec, ParamFn, RegimeSpec};
    use super::*;

    fn ar1(rho: f64, s2: f64) -> SlsSpec {
        SlsSpec::single("ar1", ParamFn::constant(0.0), ParamFn::constant(rho), ParamFn::constant(s2.sqrt()))
    }

    #[test]
    fn flat_and_ar_spectra() {
        let wn = ar1(0.0, 1.0);
        let v: f64 = local_spectrum(&wn, 0.3, 1.2).unwrap();
        assert!((v - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
        let v: f64 = local_spectrum(&ar1(0.5, 1.0), 0.3, 0.0).unwrap();
        assert!((v - 2.0 / std::f64::consts::PI).abs() < 1e-12);
        assert!(local_spectrum::<f64>(&wn, 0.0, 0.1).is_err());
        assert!(local_spectrum::<f64>(&wn, 1.5, 0.1).is_err());
    }

    #[test]
    fn closed_form_autocov() {
        let v: f64 = local_autocov_true(&ar1(0.0, 1.0), 0.5, 0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v: f64 = local_autocov_true(&ar1(0.0, 1.0), 0.5, 1).unwrap();
        assert!(v.abs() < 1e-12);
        let v: f64 = local_autocov_true(&ar1(0.9, 1.0), 0.5, 0).unwrap();
        assert!((v - 1.0 / 0.19).abs() < 1e-12);
    }

    #[test]
    fn recursion_matches_stationary_ar1() {
        let spec = ar1(0.5, 1.0);
        for k in 0..10 {
            let g: f64 = theoretical_gamma(&spec, 10_000, k).unwrap();
            let exact = 0.5f64.powi(k as i32) / 0.75 * (10_000 - k) as f64 / 10_000.0;
            assert!((g - exact).abs() < 1e-10, "k={k}: {g} vs {exact}");
        }
        assert!(theoretical_gamma::<f64>(&spec, 10, 10).is_err());
    }

    #[test]
    fn iid_gamma() {
        let spec = ar1(0.0, 1.0);
        let g0: f64 = theoretical_gamma(&spec, 50, 0).unwrap();
        let g3: f64 = theoretical_gamma(&spec, 50, 3).unwrap();
        assert!((g0 - 1.0).abs() < 1e-14);
        assert_eq!(g3, 0.0);
    }

    #[test]
    fn d_star_formula() {
        let two = |m1: f64, m2: f64| SlsSpec {
            label: "two".into(),
            regimes: vec![
                RegimeSpec { lambda_lo: 0.0, lambda_hi: 0.1, mean: ParamFn::constant(m1), ar: ParamFn::constant(0.0), sigma: ParamFn::constant(1.0) },
                RegimeSpec { lambda_lo: 0.1, lambda_hi: 1.0, mean: ParamFn::constant(m2), ar: ParamFn::constant(0.0), sigma: ParamFn::constant(1.0) },
            ],
            outliers: None,
        };
        let d: f64 = d_star_true(&two(1.27, -0.03)).unwrap();
        assert!((d - 0.1521).abs() < 1e-12);
        let d: f64 = d_star_true(&two(0.4, 0.4)).unwrap();
        assert!(d.abs() < 1e-20);
        let d: f64 = d_star_true(&builtin_spec("M1").unwrap().into_sls().unwrap()).unwrap();
        assert!(d.abs() < 1e-20);
    }
}
