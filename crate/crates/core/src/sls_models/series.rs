use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_real;
use crate::scalar::Real;

/// A finite real-valued sequence `V_1..V_T` with optional provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries<S> {
    values: Vec<S>,
    seed: Option<u64>,
    spec_label: Option<String>,
}

impl<S: Real> TimeSeries<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        Self::with_meta(values, None, None)
    }

    pub fn with_meta(values: Vec<S>, seed: Option<u64>, spec_label: Option<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("time series must contain at least one value".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite value at t = {}", i + 1)));
        }
        Ok(Self { values, seed, spec_label })
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| S::lit(v)).collect())
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    /// Sample size `T`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn spec_label(&self) -> Option<&str> {
        self.spec_label.as_deref()
    }

    pub fn mean(&self) -> S {
        crate::scalar::mean(&self.values)
    }

    /// Returns a copy with the sample mean removed.
    pub fn demeaned(&self) -> Vec<S> {
        let m = self.mean();
        self.values.iter().map(|&v| v - m).collect()
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Result<Self> {
        Self::with_meta(self.values.iter().map(|&v| f(v)).collect(), self.seed, self.spec_label.clone())
    }

    /// Writes a single-column CSV with header `v`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["v"]).map_err(csv_err)?;
        for v in &self.values {
            w.write_record([fmt_real(v.to_f64_lossy())]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the first column of a headed CSV.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
        let mut values = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let field = rec
                .get(0)
                .ok_or_else(|| Error::Parse(format!("line {}: empty record", i + 2)))?;
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: `{field}` is not a number", i + 2)))?;
            values.push(S::lit(v));
        }
        Self::new(values)
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Parse(format!("line {}: {e}", p.line())),
        None => Error::Parse(e.to_string()),
    }
}
