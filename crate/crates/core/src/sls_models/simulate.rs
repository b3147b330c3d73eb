use rand::Rng as _;
use rand_distr::StandardNormal;

use super::{Init, SlsSpec, TimeSeries};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};
use crate::scalar::Real;

/// `−1/(√2·erfc⁻¹(3/2))`, the normal-consistency factor for the MAD (≈ 1.4826).
pub fn mad_scale() -> f64 {
    -1.0 / (std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(1.5))
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// The outlier threshold `c`: scaled median absolute deviation of `values`.
pub fn outlier_floor(values: &[f64]) -> f64 {
    let med = median(values);
    let dev: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    mad_scale() * median(&dev)
}

/// Simulates `T` observations with the default stationary start.
pub fn simulate_path<S: Real>(spec: &SlsSpec, t_len: usize, seed: u64) -> Result<TimeSeries<S>> {
    simulate_path_with(spec, t_len, seed, Init::Stationary)
}

pub fn simulate_path_with<S: Real>(spec: &SlsSpec, t_len: usize, seed: u64, init: Init) -> Result<TimeSeries<S>> {
    spec.validate()?;
    if t_len < 2 {
        return Err(Error::Domain(format!("T = {t_len} must be at least 2")));
    }
    let mut rng = rng_from_seed(seed);
    let values = draw_path(spec, t_len, init, &mut rng)?;
    let values = match &spec.outliers {
        Some(rule) => {
            let clean: Vec<f64> = values.iter().map(|v: &S| v.to_f64_lossy()).collect();
            let c = outlier_floor(&clean).abs();
            let mut out = values;
            let idx = rule.indices(t_len);
            for w in idx.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::Spec(format!("outlier positions collide at t = {} for T = {t_len}", w[0])));
                }
            }
            for t in idx {
                let x: f64 = rng.random();
                let lo = rule.lo_mult * c;
                let hi = rule.hi_mult * c;
                out[t - 1] = S::lit(lo + (hi - lo) * x);
            }
            out
        }
        None => values,
    };
    TimeSeries::with_meta(values, Some(seed), Some(spec.label.clone()))
}

fn draw_path<S: Real>(spec: &SlsSpec, t_len: usize, init: Init, rng: &mut Rng) -> Result<Vec<S>> {
    let tt = S::of(t_len);
    let mut out = Vec::with_capacity(t_len);
    let mut x = S::zero();
    for t in 1..=t_len {
        let j = spec.regime_of_t(t, t_len);
        let u = S::of(t) / tt;
        let (mu, rho, sigma) = spec.coefficients::<S>(j, u);
        if rho.abs() >= S::one() || sigma <= S::zero() {
            return Err(Error::Spec(format!("invalid coefficients at t = {t}: ar = {rho}, sigma = {sigma}")));
        }
        let e: f64 = rng.sample(StandardNormal);
        let e = S::lit(e);
        x = if t == 1 {
            match init {
                Init::Stationary => sigma / (S::one() - rho * rho).sqrt() * e,
                Init::Zero => sigma * e,
            }
        } else {
            rho * x + sigma * e
        };
        let v = mu + x;
        if !v.is_finite() {
            return Err(Error::Numeric(format!("non-finite draw at t = {t}")));
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{builtin_spec, ParamFn};
    use super::*;

    #[test]
    fn mad_constant() {
        assert!((mad_scale() - 1.482_602_218_505_602).abs() < 1e-12);
    }

    #[test]
    fn white_noise_spec_gives_raw_normals() {
        let spec = SlsSpec::single("wn", ParamFn::constant(0.0), ParamFn::constant(0.0), ParamFn::constant(1.0));
        let ts = simulate_path::<f64>(&spec, 4, 11).unwrap();
        let mut rng = rng_from_seed(11);
        for &v in ts.values() {
            let e: f64 = rng.sample(StandardNormal);
            assert_eq!(v, e);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = builtin_spec("M1").unwrap().into_sls().unwrap();
        let a = simulate_path::<f64>(&spec, 200, 5).unwrap();
        let b = simulate_path::<f64>(&spec, 200, 5).unwrap();
        let c = simulate_path::<f64>(&spec, 200, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn m3_has_three_outliers_at_quartiles() {
        let m2 = builtin_spec("M2").unwrap().into_sls().unwrap();
        let m3 = builtin_spec("M3").unwrap().into_sls().unwrap();
        for seed in 0..20 {
            let clean = simulate_path::<f64>(&m2, 200, seed).unwrap();
            let dirty = simulate_path::<f64>(&m3, 200, seed).unwrap();
            let c = outlier_floor(clean.values());
            let diff: Vec<usize> = (0..200).filter(|&i| clean.values()[i] != dirty.values()[i]).map(|i| i + 1).collect();
            assert_eq!(diff, vec![50, 100, 150]);
            for t in diff {
                let v = dirty.values()[t - 1];
                assert!(v >= c && v <= 10.0 * c);
            }
        }
    }

    #[test]
    fn zero_start_differs_only_in_scale_of_first_draw() {
        let spec = SlsSpec::single("ar", ParamFn::constant(0.0), ParamFn::constant(0.5), ParamFn::constant(1.0));
        let a = simulate_path_with::<f64>(&spec, 3, 1, Init::Stationary).unwrap();
        let b = simulate_path_with::<f64>(&spec, 3, 1, Init::Zero).unwrap();
        assert!((a.values()[0] * 0.75f64.sqrt() - b.values()[0]).abs() < 1e-15);
    }

    #[test]
    fn f32_path_tracks_f64() {
        let spec = builtin_spec("M2").unwrap().into_sls().unwrap();
        let a = simulate_path::<f64>(&spec, 100, 3).unwrap();
        let b = simulate_path::<f32>(&spec, 100, 3).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - *y as f64).abs() < 1e-4);
        }
    }
}
