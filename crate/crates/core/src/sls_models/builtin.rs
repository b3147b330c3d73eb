use serde::{Deserialize, Serialize};

use super::{OutlierRule, ParamFn, RegimeSpec, SlsSpec};
use crate::error::{Error, Result};

pub const BUILTIN_SPEC_NAMES: [&str; 8] = ["M1", "M2", "M3", "M4", "DM1", "DM2", "DM3", "DM4"];

/// How the second competing predictor of the forecast-comparison design is contaminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DmSpecification {
    /// Level `δ` on `t = 3T/4, …, 3T/4+20`.
    Break,
    /// Level `δ·sin(t/T − 3/4)` on the same window.
    LocalSine,
    /// Level `δ·sin(t/T − 1/2 − 30/T)` on `t = T/2−30, …, T/2+20`.
    LocalSineStraddle,
    /// As `LocalSine`, plus outliers at `t = 6T/10` and `t = 8T/10`.
    LocalSineOutliers,
}

impl DmSpecification {
    pub fn number(self) -> usize {
        match self {
            DmSpecification::Break => 1,
            DmSpecification::LocalSine => 2,
            DmSpecification::LocalSineStraddle => 3,
            DmSpecification::LocalSineOutliers => 4,
        }
    }

    pub fn from_number(n: usize) -> Result<Self> {
        match n {
            1 => Ok(DmSpecification::Break),
            2 => Ok(DmSpecification::LocalSine),
            3 => Ok(DmSpecification::LocalSineStraddle),
            4 => Ok(DmSpecification::LocalSineOutliers),
            _ => Err(Error::Lookup { kind: "forecast specification", name: n.to_string(), valid: "1, 2, 3, 4".into() }),
        }
    }

    /// One-based inclusive window `(start, end)` on which the level replaces the signal.
    pub fn window(self, t_len: usize) -> (usize, usize) {
        match self {
            DmSpecification::LocalSineStraddle => (t_len / 2 - 30, t_len / 2 + 20),
            _ => (3 * t_len / 4, 3 * t_len / 4 + 20),
        }
    }

    /// Level `δ(t/T)` inside the window.
    pub fn level(self, t: usize, t_len: usize, delta: f64) -> f64 {
        let u = t as f64 / t_len as f64;
        match self {
            DmSpecification::Break => delta,
            DmSpecification::LocalSine | DmSpecification::LocalSineOutliers => delta * (u - 0.75).sin(),
            DmSpecification::LocalSineStraddle => delta * (u - 0.5 - 30.0 / t_len as f64).sin(),
        }
    }

    pub fn outlier_times(self, t_len: usize) -> Vec<usize> {
        match self {
            DmSpecification::LocalSineOutliers => vec![6 * t_len / 10, 8 * t_len / 10],
            _ => Vec::new(),
        }
    }

    /// Outlier draw multipliers of the scaled MAD.
    pub fn outlier_multipliers(self) -> (f64, f64) {
        (1.0, 5.0)
    }

    /// The level component over the evaluation sample `t = T/2+1, …, T−1`, as a
    /// regime-mean specification on that sample's own unit interval. Its
    /// contamination term scales exactly with `δ²`.
    pub fn contamination_spec(self, t_len: usize, delta: f64) -> SlsSpec {
        let half = t_len / 2;
        let n_eval = (t_len - 1 - half) as f64;
        let (s, e) = self.window(t_len);
        let i_s = s.saturating_sub(half).max(1) as f64;
        let i_e = (e - half) as f64;
        let a = (i_s - 1.0) / n_eval;
        let b = (i_e / n_eval).min(1.0);
        let tf = t_len as f64;
        let level = match self {
            DmSpecification::Break => ParamFn::constant(delta),
            DmSpecification::LocalSine | DmSpecification::LocalSineOutliers => {
                ParamFn::Sin { amp: delta, freq: n_eval / tf, phase: half as f64 / tf - 0.75 }
            }
            DmSpecification::LocalSineStraddle => {
                ParamFn::Sin { amp: delta, freq: n_eval / tf, phase: half as f64 / tf - 0.5 - 30.0 / tf }
            }
        };
        let flat = |lo: f64, hi: f64, mean: ParamFn| RegimeSpec {
            lambda_lo: lo,
            lambda_hi: hi,
            mean,
            ar: ParamFn::constant(0.0),
            sigma: ParamFn::constant(1.0),
        };
        let mut regimes = Vec::new();
        if a > 0.0 {
            regimes.push(flat(0.0, a, ParamFn::constant(0.0)));
        }
        regimes.push(flat(a, b, level));
        if b < 1.0 {
            regimes.push(flat(b, 1.0, ParamFn::constant(0.0)));
        }
        SlsSpec { label: format!("DM{}-level", self.number()), regimes, outliers: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BuiltinModel {
    Sls(SlsSpec),
    Dm(DmSpecification),
}

impl BuiltinModel {
    pub fn into_sls(self) -> Option<SlsSpec> {
        match self {
            BuiltinModel::Sls(s) => Some(s),
            BuiltinModel::Dm(_) => None,
        }
    }

    pub fn into_dm(self) -> Option<DmSpecification> {
        match self {
            BuiltinModel::Dm(d) => Some(d),
            BuiltinModel::Sls(_) => None,
        }
    }
}

fn tvar_single(label: &str, rho_amp: f64, variance: f64) -> SlsSpec {
    SlsSpec::single(
        label,
        ParamFn::constant(0.0),
        ParamFn::Cos { amp: rho_amp, freq: 1.5, phase: 0.0 },
        ParamFn::constant(variance.sqrt()),
    )
}

/// Built-in models `M1`–`M4` and forecast designs `DM1`–`DM4`.
pub fn builtin_spec(name: &str) -> Result<BuiltinModel> {
    let spec = match name.to_ascii_uppercase().as_str() {
        "M1" => SlsSpec {
            label: "M1".into(),
            regimes: vec![
                RegimeSpec {
                    lambda_lo: 0.0,
                    lambda_hi: 0.1,
                    mean: ParamFn::constant(0.0),
                    ar: ParamFn::constant(0.9),
                    sigma: ParamFn::constant(1.0),
                },
                RegimeSpec {
                    lambda_lo: 0.1,
                    lambda_hi: 1.0,
                    mean: ParamFn::constant(0.0),
                    ar: ParamFn::CosOfCos { amp: 0.3, shift: 1.5 },
                    sigma: ParamFn::constant(0.5f64.sqrt()),
                },
            ],
            outliers: None,
        },
        "M2" => tvar_single("M2", 0.7, 0.5),
        "M3" => {
            let mut s = tvar_single("M3", 0.7, 0.5);
            s.outliers = Some(OutlierRule {
                positions: vec![0.25, 0.5, 0.75],
                scale_rule: "mad-uniform".into(),
                lo_mult: 1.0,
                hi_mult: 10.0,
            });
            s
        }
        "M4" => tvar_single("M4", 0.95, 0.4),
        "DM1" => return Ok(BuiltinModel::Dm(DmSpecification::Break)),
        "DM2" => return Ok(BuiltinModel::Dm(DmSpecification::LocalSine)),
        "DM3" => return Ok(BuiltinModel::Dm(DmSpecification::LocalSineStraddle)),
        "DM4" => return Ok(BuiltinModel::Dm(DmSpecification::LocalSineOutliers)),
        _ => {
            return Err(Error::Lookup {
                kind: "model",
                name: name.to_string(),
                valid: BUILTIN_SPEC_NAMES.join(", "),
            })
        }
    };
    Ok(BuiltinModel::Sls(spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sls_models::d_star_true;

    fn rho_range(spec: &SlsSpec, j: usize) -> (f64, f64) {
        let r = &spec.regimes[j];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 1..=10_000 {
            let u = r.lambda_lo + (r.lambda_hi - r.lambda_lo) * i as f64 / 10_000.0;
            let v: f64 = r.ar.eval(u);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    #[test]
    fn autoregressive_ranges() {
        let m1 = builtin_spec("M1").unwrap().into_sls().unwrap();
        let (lo, hi) = rho_range(&m1, 1);
        assert!(lo >= 0.172 && hi <= 0.263, "{lo} {hi}");
        let m4 = builtin_spec("M4").unwrap().into_sls().unwrap();
        let (lo, hi) = rho_range(&m4, 0);
        assert!(lo >= 0.0672 && hi <= 0.95, "{lo} {hi}");
        let m2 = builtin_spec("m2").unwrap().into_sls().unwrap();
        let (lo, hi) = rho_range(&m2, 0);
        assert!(lo >= 0.049 && hi <= 0.7, "{lo} {hi}");
    }

    #[test]
    fn unknown_name() {
        let err = builtin_spec("M9").unwrap_err();
        assert!(matches!(err, Error::Lookup { .. }));
        assert!(err.to_string().contains("M9"));
    }

    #[test]
    fn dm_windows() {
        assert_eq!(DmSpecification::Break.window(200), (150, 170));
        assert_eq!(DmSpecification::LocalSineStraddle.window(200), (70, 120));
        assert_eq!(DmSpecification::LocalSineOutliers.outlier_times(400), vec![240, 320]);
        assert!(DmSpecification::Break.outlier_times(200).is_empty());
        assert_eq!(DmSpecification::LocalSine.level(150, 200, 3.0), 0.0);
    }

    #[test]
    fn dm_level_contamination_is_quadratic_in_delta() {
        for spec in [DmSpecification::Break, DmSpecification::LocalSine, DmSpecification::LocalSineStraddle] {
            let d1: f64 = d_star_true(&spec.contamination_spec(200, 1.0)).unwrap();
            for delta in [0.5, 2.0, 10.0] {
                let d: f64 = d_star_true(&spec.contamination_spec(200, delta)).unwrap();
                assert!((d - delta * delta * d1).abs() <= 1e-12 * d.max(1.0), "{spec:?} {delta}");
            }
        }
        // The window covers 21 of the 99 evaluation points.
        let d: f64 = d_star_true(&DmSpecification::Break.contamination_spec(200, 1.0)).unwrap();
        let r = 21.0 / 99.0;
        assert!((d - r * (1.0 - r)).abs() < 1e-12);
    }
}
