//! Global and local autocovariances, periodograms, and contamination diagnostics.

mod acf;
mod contamination;
mod local;
mod periodogram;

pub use acf::{autocov_all, sample_autocov};
pub(crate) use acf::autocov_lags;
pub use contamination::{break_share, contamination_term, d_star_hat, ContaminationReport, RegimeSummary};
pub use local::{
    center_index, dk_autocov, dk_autocov_kernel, dk_autocov_kernel_with, local_autocov_hat,
    local_autocov_hat_with, local_periodogram,
};
pub(crate) use local::{kernel_local_acf, kernel_local_mean};
pub use periodogram::{dft_direct, periodogram, PeriodogramEstimate};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::fmt_real;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcfMethod {
    Global,
    Dk,
}

/// Autocovariances at a set of nonnegative lags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcfEstimate<S> {
    pub lags: Vec<usize>,
    pub values: Vec<S>,
    pub demeaned: bool,
    pub method: AcfMethod,
    /// Number of local windows shifted inward to stay inside the sample.
    #[serde(default)]
    pub clamped_windows: usize,
}

impl<S: Real> AcfEstimate<S> {
    pub fn value_at(&self, lag: usize) -> Option<S> {
        self.lags.iter().position(|&l| l == lag).map(|i| self.values[i])
    }

    /// CSV with columns `lag,value`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["lag", "value"]).map_err(crate::sls_models::csv_err)?;
        for (l, v) in self.lags.iter().zip(&self.values) {
            w.write_record([l.to_string(), fmt_real(v.to_f64_lossy())]).map_err(crate::sls_models::csv_err)?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?).expect("utf8"))
    }
}
