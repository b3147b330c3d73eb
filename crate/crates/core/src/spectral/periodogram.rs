use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::fmt_real;
use crate::scalar::Real;
use crate::sls_models::TimeSeries;

/// Ordinates on `[0, π]`; the negative half follows by symmetry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodogramEstimate<S> {
    pub frequencies: Vec<S>,
    pub ordinates: Vec<S>,
    /// `(u, n)` for a local periodogram.
    pub window: Option<(f64, usize)>,
}

impl<S: Real> PeriodogramEstimate<S> {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["freq", "value"]).map_err(crate::sls_models::csv_err)?;
        for (f, v) in self.frequencies.iter().zip(&self.ordinates) {
            w.write_record([fmt_real(f.to_f64_lossy()), fmt_real(v.to_f64_lossy())])
                .map_err(crate::sls_models::csv_err)?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?).expect("utf8"))
    }
}

/// `|n^{−1/2} Σ_s x_s e^{−iω_l s}|²` at `ω_l = 2πl/n`, `l = 0..=⌊n/2⌋`.
pub(crate) fn half_spectrum<S: Real>(x: &[S]) -> (Vec<S>, Vec<S>) {
    let n = x.len();
    let mut buf: Vec<Complex<S>> = x.iter().map(|&v| Complex::new(v, S::zero())).collect();
    FftPlanner::<S>::new().plan_fft_forward(n).process(&mut buf);
    let nn = S::of(n);
    let two_pi = S::lit(2.0) * S::PI();
    let m = n / 2;
    let freqs = (0..=m).map(|l| two_pi * S::of(l) / nn).collect();
    let ords = buf.iter().take(m + 1).map(|z| z.norm_sqr() / nn).collect();
    (freqs, ords)
}

/// `I_T(ω_j) = |T^{−1/2} Σ_t e^{−iω_j t} V_t|²` at the Fourier frequencies in `[0, π]`.
pub fn periodogram<S: Real>(y: &TimeSeries<S>) -> PeriodogramEstimate<S> {
    let (frequencies, ordinates) = half_spectrum(y.values());
    PeriodogramEstimate { frequencies, ordinates, window: None }
}

/// `O(n²)` reference DFT `|n^{−1/2} Σ_s x_s e^{−iωs}|²` at one frequency.
pub fn dft_direct(x: &[f64], omega: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (s, &v) in x.iter().enumerate() {
        let a = omega * s as f64;
        re += v * a.cos();
        im -= v * a.sin();
    }
    (re * re + im * im) / x.len() as f64
}
