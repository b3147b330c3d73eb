//! Second-order Edgeworth corrections for HAC and DK-HAC studentized means.
//!
//! Only `d_f = 2` is supported. For a tvAR(1) spectrum the needed derivatives
//! are available in closed form; u-integrals run per regime so that break
//! points never sit inside a quadrature interval.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::{LagKernel, SmoothingKernel};
use crate::quadrature::integrate;
use crate::sls_models::{ParamFn, SlsSpec};

const QUAD_TOL: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    /// `∫ f(u, 0) du`.
    pub f0_int: f64,
    /// `∫ ∂^{d_f}_ω f(u, 0) du`.
    pub fd_int: f64,
    /// `∫ ∂²_u f(u, 0) du` over the continuity set.
    pub fuu0_int: f64,
    pub d_f: u32,
    /// `μ_{d_f}(K)`, equal to `d_f!·k_q` with `k_q` the kernel's generalized derivative.
    pub kernel_moment: f64,
    /// `∫ x² K_2(x) dx`.
    pub k2_moment: f64,
}

/// `∂²_ω f(u, ω)` at `ω = 0` for an AR(1) with coefficient `ρ` and innovation sd `σ`.
pub fn ar1_spectrum_d2_omega(rho: f64, sigma: f64) -> f64 {
    -sigma * sigma * rho / (PI * (1.0 - rho).powi(4))
}

/// `f(u, 0) = σ²(u) / (2π(1 − ρ(u))²)` and its first two u-derivatives.
fn f0_with_u_derivatives(ar: &ParamFn, sd: &ParamFn, u: f64) -> (f64, f64, f64) {
    let (r, r1, r2): (f64, f64, f64) = (ar.eval(u), ar.d1(u), ar.d2(u));
    let (s, s1, s2): (f64, f64, f64) = (sd.eval(u), sd.d1(u), sd.d2(u));
    let h = s * s;
    let h1 = 2.0 * s * s1;
    let h2 = 2.0 * (s1 * s1 + s * s2);
    let g = 1.0 - r;
    let q = g.powi(-2);
    let q1 = 2.0 * r1 * g.powi(-3);
    let q2 = 2.0 * r2 * g.powi(-3) + 6.0 * r1 * r1 * g.powi(-4);
    let c = 1.0 / (2.0 * PI);
    (c * h * q, c * (h1 * q + h * q1), c * (h2 * q + 2.0 * h1 * q1 + h * q2))
}

/// Analytic `(∂_u f(u, 0), ∂²_u f(u, 0))` inside the regime containing `u`.
pub fn spectrum_u_derivatives(spec: &SlsSpec, u: f64) -> Result<(f64, f64)> {
    let r = &spec.regimes[spec.regime_of_u(u)?];
    let (_, d1, d2) = f0_with_u_derivatives(&r.ar, &r.sigma, u);
    Ok((d1, d2))
}

/// Integrals of the spectrum at frequency zero for a tvAR(1) specification.
pub fn spectral_summary_tvar1(
    spec: &SlsSpec,
    d_f: u32,
    kernel: LagKernel,
    k2: SmoothingKernel,
) -> Result<SpectralSummary> {
    if d_f < 2 {
        return Err(Error::Domain(format!("d_f = {d_f} must be at least 2")));
    }
    if d_f > 2 {
        return Err(Error::UnsupportedModel(format!("only d_f = 2 is implemented, got {d_f}")));
    }
    if spec.outliers.is_some() {
        return Err(Error::UnsupportedModel("outlier contamination has no tvAR(1) spectrum".into()));
    }
    spec.validate()?;
    let (q, k_q) = kernel.characteristic();
    if q != d_f {
        return Err(Error::UnsupportedModel(format!(
            "{} kernel has characteristic exponent {q}, not {d_f}",
            kernel.name()
        )));
    }
    let (mut f0_int, mut fd_int, mut fuu0_int) = (0.0, 0.0, 0.0);
    for r in &spec.regimes {
        let (lo, hi) = (r.lambda_lo, r.lambda_hi);
        f0_int += integrate(|u: f64| f0_with_u_derivatives(&r.ar, &r.sigma, u).0, lo, hi, QUAD_TOL)?;
        fd_int += integrate(
            |u: f64| ar1_spectrum_d2_omega(r.ar.eval(u), r.sigma.eval(u)),
            lo,
            hi,
            QUAD_TOL,
        )?;
        fuu0_int += integrate(|u: f64| f0_with_u_derivatives(&r.ar, &r.sigma, u).2, lo, hi, QUAD_TOL)?;
    }
    Ok(SpectralSummary {
        f0_int,
        fd_int,
        fuu0_int,
        d_f,
        kernel_moment: 2.0 * k_q,
        k2_moment: k2.second_moment(),
    })
}

fn check_f0(s: &SpectralSummary) -> Result<()> {
    if !(s.f0_int > 0.0) {
        return Err(Error::Domain(format!("∫f(u,0)du = {} must be positive", s.f0_int)));
    }
    Ok(())
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Relative bias coefficient of the lag-kernel smoother.
pub fn cbar1(s: &SpectralSummary) -> Result<f64> {
    check_f0(s)?;
    Ok(s.kernel_moment * s.fd_int / (factorial(s.d_f) * s.f0_int))
}

/// Relative bias coefficient of the time smoother.
pub fn cbar2(s: &SpectralSummary) -> Result<f64> {
    check_f0(s)?;
    Ok(s.k2_moment * s.fuu0_int / (2.0 * s.f0_int))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeworthCdf {
    pub c1: f64,
    pub c2: Option<f64>,
    pub b1: f64,
    pub b2: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeworthForm {
    /// `Φ(z) + a·zφ(z)`.
    #[default]
    Additive,
    /// `Φ(z(1 + a))`.
    Rescaled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CdfValue {
    pub value: f64,
    /// True when the raw expansion was non-monotone or left `[0, 1]` at this point.
    pub clamped: bool,
}

impl EdgeworthCdf {
    pub fn hac(c1: f64, b1: f64) -> Self {
        EdgeworthCdf { c1, c2: None, b1, b2: None }
    }

    pub fn dk(c1: f64, c2: f64, b1: f64, b2: f64) -> Self {
        EdgeworthCdf { c1, c2: Some(c2), b1, b2: Some(b2) }
    }

    /// Combined correction `a = ½c̄₁b₁² + ½c̄₂b₂²`.
    pub fn correction(&self) -> f64 {
        let mut a = 0.5 * self.c1 * self.b1 * self.b1;
        if let (Some(c2), Some(b2)) = (self.c2, self.b2) {
            a += 0.5 * c2 * b2 * b2;
        }
        a
    }

    pub fn evaluate(&self, z: f64, form: EdgeworthForm) -> CdfValue {
        let a = self.correction();
        let n = std_normal();
        let (raw, mut clamped) = match form {
            EdgeworthForm::Rescaled => (n.cdf(z * (1.0 + a)), 1.0 + a <= 0.0),
            EdgeworthForm::Additive => {
                // Beyond |z| = √(1 + 1/a) the raw expansion turns back; hold its extreme.
                let zz = if a > 0.0 {
                    let edge = (1.0 + 1.0 / a).sqrt();
                    z.clamp(-edge, edge)
                } else {
                    z
                };
                (n.cdf(zz) + a * zz * n.pdf(zz), zz != z)
            }
        };
        if !(0.0..=1.0).contains(&raw) {
            clamped = true;
        }
        CdfValue { value: raw.clamp(0.0, 1.0), clamped }
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Additive Edgeworth approximation to `P(Z_T ≤ z)`.
pub fn edgeworth_cdf(z: f64, model: &EdgeworthCdf) -> f64 {
    model.evaluate(z, EdgeworthForm::Additive).value
}

/// Argument-rescaled variant `Φ(z(1 + a))`.
pub fn edgeworth_cdf_rescaled(z: f64, model: &EdgeworthCdf) -> f64 {
    model.evaluate(z, EdgeworthForm::Rescaled).value
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErpMethod {
    Hac,
    Dk,
}

impl ErpMethod {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "hac" => Ok(ErpMethod::Hac),
            "dk" => Ok(ErpMethod::Dk),
            _ => Err(Error::Lookup { kind: "ERP method", name: name.into(), valid: "hac, dk".into() }),
        }
    }
}

/// Nominal ERP scale `(T b₁)^{−1/2}` or `(T b₁ b₂)^{−1/2}`, paired with `1/T`.
pub fn erp_order_report(method: ErpMethod, t_len: usize, b1: f64, b2: Option<f64>) -> Result<(f64, f64)> {
    if !(b1 > 0.0) || t_len == 0 {
        return Err(Error::Domain(format!("need T > 0 and b1 > 0, got T = {t_len}, b1 = {b1}")));
    }
    let t = t_len as f64;
    let scale = match (method, b2) {
        (ErpMethod::Hac, _) => (t * b1).powf(-0.5),
        (ErpMethod::Dk, Some(b2)) if b2 > 0.0 => (t * b1 * b2).powf(-0.5),
        (ErpMethod::Dk, _) => return Err(Error::Domain("dk ERP order needs a positive b2".into())),
    };
    Ok((scale, 1.0 / t))
}
