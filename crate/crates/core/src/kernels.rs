//! Lag-window and time-smoothing kernels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lag window `K_1` applied to `b1·k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagKernel {
    Bartlett,
    Qs,
}

impl LagKernel {
    pub fn name(self) -> &'static str {
        match self {
            LagKernel::Bartlett => "bartlett",
            LagKernel::Qs => "qs",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "bartlett" => Ok(LagKernel::Bartlett),
            "qs" | "quadratic-spectral" => Ok(LagKernel::Qs),
            _ => Err(Error::Lookup { kind: "lag kernel", name: name.into(), valid: "bartlett, qs".into() }),
        }
    }

    pub fn eval<S: Real>(self, x: S) -> S {
        match self {
            LagKernel::Bartlett => (S::one() - x.abs()).max(S::zero()),
            LagKernel::Qs => {
                let z = S::lit(6.0 / 5.0) * S::PI() * x;
                let z2 = z * z;
                if z.abs() < S::lit(0.1) {
                    // Series 1 − z²/10 + z⁴/280 − z⁶/15120 avoids cancellation near zero.
                    return S::one() - z2 / S::lit(10.0) + z2 * z2 / S::lit(280.0) - z2 * z2 * z2 / S::lit(15120.0);
                }
                S::lit(3.0) / z2 * (z.sin() / z - z.cos())
            }
        }
    }

    /// Largest lag with a possibly nonzero weight at bandwidth `b1`, capped at `t_len − 1`.
    pub fn support<S: Real>(self, b1: S, t_len: usize) -> usize {
        match self {
            LagKernel::Bartlett => {
                let l = (S::one() / b1).ceil().to_f64_lossy();
                if l.is_finite() && l < t_len as f64 {
                    (l as usize).min(t_len - 1)
                } else {
                    t_len - 1
                }
            }
            LagKernel::Qs => t_len - 1,
        }
    }

    /// Characteristic exponent `q` and generalized derivative `k_q = lim (1 − K(x))/|x|^q`.
    pub fn characteristic(self) -> (u32, f64) {
        match self {
            LagKernel::Bartlett => (1, 1.0),
            LagKernel::Qs => (2, 18.0 * std::f64::consts::PI.powi(2) / 125.0),
        }
    }
}

/// Time-smoothing kernel `K_2` supported on `[0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingKernel {
    /// `6x(1 − x)`.
    #[default]
    Quadratic,
    /// Indicator of `[0, 1)`.
    Rectangular,
}

impl SmoothingKernel {
    pub fn eval<S: Real>(self, x: S) -> S {
        match self {
            SmoothingKernel::Quadratic => {
                if x < S::zero() || x > S::one() {
                    S::zero()
                } else {
                    S::lit(6.0) * x * (S::one() - x)
                }
            }
            SmoothingKernel::Rectangular => {
                if x >= S::zero() && x < S::one() {
                    S::one()
                } else {
                    S::zero()
                }
            }
        }
    }

    /// `∫₀¹ x² K_2(x) dx`.
    pub fn second_moment(self) -> f64 {
        match self {
            SmoothingKernel::Quadratic => 0.3,
            SmoothingKernel::Rectangular => 1.0 / 3.0,
        }
    }
}
