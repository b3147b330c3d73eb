use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A named parametric curve on the unit interval, with analytic derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ParamFn {
    /// `value`
    Const { value: f64 },
    /// `amp * cos(freq * u + phase)`
    Cos {
        amp: f64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amp * sin(freq * u + phase)`
    Sin {
        amp: f64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amp * cos(shift - cos u)`
    CosOfCos { amp: f64, shift: f64 },
    /// `intercept + slope * u`
    Linear { intercept: f64, slope: f64 },
}

impl ParamFn {
    pub fn constant(value: f64) -> Self {
        ParamFn::Const { value }
    }

    pub fn eval<S: Real>(&self, u: S) -> S {
        match *self {
            ParamFn::Const { value } => S::lit(value),
            ParamFn::Cos { amp, freq, phase } => S::lit(amp) * (S::lit(freq) * u + S::lit(phase)).cos(),
            ParamFn::Sin { amp, freq, phase } => S::lit(amp) * (S::lit(freq) * u + S::lit(phase)).sin(),
            ParamFn::CosOfCos { amp, shift } => S::lit(amp) * (S::lit(shift) - u.cos()).cos(),
            ParamFn::Linear { intercept, slope } => S::lit(intercept) + S::lit(slope) * u,
        }
    }

    /// First derivative in `u`.
    pub fn d1<S: Real>(&self, u: S) -> S {
        match *self {
            ParamFn::Const { .. } => S::zero(),
            ParamFn::Cos { amp, freq, phase } => {
                -S::lit(amp * freq) * (S::lit(freq) * u + S::lit(phase)).sin()
            }
            ParamFn::Sin { amp, freq, phase } => {
                S::lit(amp * freq) * (S::lit(freq) * u + S::lit(phase)).cos()
            }
            ParamFn::CosOfCos { amp, shift } => {
                -S::lit(amp) * (S::lit(shift) - u.cos()).sin() * u.sin()
            }
            ParamFn::Linear { slope, .. } => S::lit(slope),
        }
    }

    /// Second derivative in `u`.
    pub fn d2<S: Real>(&self, u: S) -> S {
        match *self {
            ParamFn::Const { .. } | ParamFn::Linear { .. } => S::zero(),
            ParamFn::Cos { amp, freq, phase } => {
                -S::lit(amp * freq * freq) * (S::lit(freq) * u + S::lit(phase)).cos()
            }
            ParamFn::Sin { amp, freq, phase } => {
                -S::lit(amp * freq * freq) * (S::lit(freq) * u + S::lit(phase)).sin()
            }
            ParamFn::CosOfCos { amp, shift } => {
                let h = S::lit(shift) - u.cos();
                let s = u.sin();
                -S::lit(amp) * (h.cos() * s * s + h.sin() * u.cos())
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            ParamFn::Const { .. } => true,
            ParamFn::Cos { amp, freq, .. } | ParamFn::Sin { amp, freq, .. } => amp == 0.0 || freq == 0.0,
            ParamFn::CosOfCos { amp, .. } => amp == 0.0,
            ParamFn::Linear { slope, .. } => slope == 0.0,
        }
    }
}
