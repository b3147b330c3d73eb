//! Globally adaptive Gauss–Kronrod (7/15 point) integration.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

struct Piece<S> {
    a: S,
    b: S,
    value: S,
    error: S,
}

fn kronrod<S: Real, F: Fn(S) -> S>(f: &F, a: S, b: S) -> Piece<S> {
    let half = S::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kron = fc * S::lit(WGK[7]);
    let mut gauss = fc * S::lit(WG[3]);
    for j in 0..7 {
        let dx = radius * S::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kron = kron + S::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + S::lit(WG[j / 2]) * pair;
        }
    }
    Piece {
        a,
        b,
        value: kron * radius,
        error: ((kron - gauss) * radius).abs(),
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<S: Real, F: Fn(S) -> S>(f: F, a: S, b: S, tol: S) -> Result<S> {
    if a == b {
        return Ok(S::zero());
    }
    let mut pieces = vec![kronrod(&f, a, b)];
    loop {
        let total_err: S = pieces.iter().map(|p| p.error).sum();
        if total_err <= tol {
            break;
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Numeric(format!(
                "quadrature did not converge: error estimate {} above tolerance {}",
                total_err, tol
            )));
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0, S::neg_infinity()), |acc, (i, p)| {
                if p.error > acc.1 {
                    (i, p.error)
                } else {
                    acc
                }
            });
        let p = pieces.swap_remove(worst);
        let mid = S::lit(0.5) * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Numeric("quadrature interval collapsed".into()));
        }
        pieces.push(kronrod(&f, p.a, mid));
        pieces.push(kronrod(&f, mid, p.b));
    }
    let value = pieces.iter().map(|p| p.value).sum::<S>();
    if !value.is_finite() {
        return Err(Error::Numeric("quadrature produced a non-finite value".into()));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x: f64| 6.0 * x * (1.0 - x), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn peaked_integrand() {
        // ∫ dω / (1 + ρ² − 2ρ cos ω) over [−π, π] = 2π / (1 − ρ²)
        let rho = 0.95;
        let v = integrate(|w: f64| 1.0 / (1.0 + rho * rho - 2.0 * rho * w.cos()), -PI, PI, 1e-10).unwrap();
        assert!((v - 2.0 * PI / (1.0 - rho * rho)).abs() < 1e-9);
    }

    #[test]
    fn single_precision() {
        let v = integrate(|x: f32| x.sin(), 0.0, std::f32::consts::PI, 1e-5).unwrap();
        assert!((v - 2.0).abs() < 1e-5);
    }
}
