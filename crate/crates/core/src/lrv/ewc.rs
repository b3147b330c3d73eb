use super::LrvEstimate;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sls_models::TimeSeries;

/// Default number of cosine terms: `0.4·T^{2/3}` rounded to the nearest even integer (at least 2).
pub fn ewc_default_b(t_len: usize) -> usize {
    let b = 2.0 * (0.4 * (t_len as f64).powf(2.0 / 3.0) / 2.0).round();
    (b as usize).max(2)
}

/// `B^{−1} Σ_{j=1}^B Λ_j²` with `Λ_j = √(2/T) Σ_t V_t cos(πj(t − ½)/T)`.
pub fn ewc<S: Real>(y: &TimeSeries<S>, b: usize) -> Result<LrvEstimate<S>> {
    let t_len = y.len();
    if b < 1 || b >= t_len {
        return Err(Error::Domain(format!("B = {b} must satisfy 1 <= B < T = {t_len}")));
    }
    let v = y.values();
    let tt = S::of(t_len);
    let scale = (S::lit(2.0) / tt).sqrt();
    let half = S::lit(0.5);
    let mut total = S::zero();
    for j in 1..=b {
        let w = S::PI() * S::of(j) / tt;
        let lambda = v
            .iter()
            .enumerate()
            .map(|(i, &x)| x * (w * (S::of(i + 1) - half)).cos())
            .sum::<S>()
            * scale;
        total = total + lambda * lambda;
    }
    Ok(LrvEstimate::new(total / S::of(b), "ewc", b as f64).diag("B", b as f64))
}
