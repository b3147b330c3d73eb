use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_real;
use crate::sls_models::csv_err;

use super::acf::AcfRow;

/// Replication count assumed for shipped reference tables.
pub const REFERENCE_REPS: usize = 2000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub delta: f64,
    pub reject_rate: f64,
    /// `√(p(1 − p)/R)`.
    pub mc_se: f64,
    #[serde(default)]
    pub degenerate: usize,
    #[serde(default)]
    pub failures: usize,
}

impl Cell {
    pub fn new(delta: f64, reject_rate: f64, reps: usize) -> Self {
        let p = reject_rate;
        Cell { delta, reject_rate: p, mc_se: (p * (1.0 - p) / reps as f64).sqrt(), degenerate: 0, failures: 0 }
    }

    pub(crate) fn from_counts(delta: f64, rejections: usize, reps: usize) -> Self {
        Cell::new(delta, rejections as f64 / reps as f64, reps)
    }

    pub fn is_aborted(&self) -> bool {
        self.reject_rate.is_nan()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodRow {
    pub method: String,
    pub cells: Vec<Cell>,
}

/// Rejection frequencies by method and δ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub table: String,
    pub rows: Vec<MethodRow>,
    pub reps: usize,
    pub base_seed: u64,
    pub version: String,
}

#[derive(Serialize, Deserialize)]
struct CsvRecord {
    table: String,
    method: String,
    delta: f64,
    reject_rate: f64,
    #[serde(default)]
    mc_se: Option<f64>,
    #[serde(default)]
    reps: Option<usize>,
    #[serde(default)]
    base_seed: Option<u64>,
}

impl ExperimentTable {
    pub fn deltas(&self) -> Vec<f64> {
        self.rows.first().map(|r| r.cells.iter().map(|c| c.delta).collect()).unwrap_or_default()
    }

    pub fn methods(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.method.as_str()).collect()
    }

    pub fn row(&self, method: &str) -> Option<&MethodRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn cell(&self, method: &str, delta: f64) -> Option<&Cell> {
        self.row(method)?.cells.iter().find(|c| c.delta == delta)
    }

    pub fn rate(&self, method: &str, delta: f64) -> Option<f64> {
        self.cell(method, delta).map(|c| c.reject_rate)
    }

    /// Long format: `table,method,delta,reject_rate,mc_se,reps,base_seed`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["table", "method", "delta", "reject_rate", "mc_se", "reps", "base_seed"])
            .map_err(csv_err)?;
        for row in &self.rows {
            for c in &row.cells {
                w.write_record([
                    self.table.clone(),
                    row.method.clone(),
                    fmt_real(c.delta),
                    fmt_real(c.reject_rate),
                    fmt_real(c.mc_se),
                    self.reps.to_string(),
                    self.base_seed.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("table serializes")
    }

    /// Parses the long CSV format. Missing `mc_se`/`reps` columns fall back to `default_reps`.
    pub fn from_csv(text: &str, default_reps: usize) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let mut table: Option<ExperimentTable> = None;
        for (i, rec) in rdr.deserialize::<CsvRecord>().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("record {}: {e}", i + 1)))?;
            let reps = rec.reps.unwrap_or(default_reps);
            let t = table.get_or_insert_with(|| ExperimentTable {
                table: rec.table.clone(),
                rows: Vec::new(),
                reps,
                base_seed: rec.base_seed.unwrap_or(0),
                version: String::new(),
            });
            if rec.table != t.table || reps != t.reps {
                return Err(Error::Schema(format!("record {} mixes tables or replication counts", i + 1)));
            }
            let mut cell = Cell::new(rec.delta, rec.reject_rate, reps);
            if let Some(se) = rec.mc_se {
                cell.mc_se = se;
            }
            match t.rows.iter_mut().find(|r| r.method == rec.method) {
                Some(row) => row.cells.push(cell),
                None => t.rows.push(MethodRow { method: rec.method, cells: vec![cell] }),
            }
        }
        let t = table.ok_or_else(|| Error::Schema("table has no records".into()))?;
        let deltas = t.deltas();
        if t.rows.iter().any(|r| r.cells.iter().map(|c| c.delta).collect::<Vec<_>>() != deltas) {
            return Err(Error::Schema("every method must share the same delta grid".into()));
        }
        Ok(t)
    }
}

fn reference_csv(name: &str) -> Option<&'static str> {
    Some(match name {
        "table2" => include_str!("../../data/reference/table2.csv"),
        "table3" => include_str!("../../data/reference/table3.csv"),
        "table4" => include_str!("../../data/reference/table4.csv"),
        "table5" => include_str!("../../data/reference/table5.csv"),
        "table6_1" => include_str!("../../data/reference/table6_1.csv"),
        "table6_2" => include_str!("../../data/reference/table6_2.csv"),
        "table6_3" => include_str!("../../data/reference/table6_3.csv"),
        "table6_4" => include_str!("../../data/reference/table6_4.csv"),
        _ => return None,
    })
}

/// Shipped reference rejection table, with `mc_se` computed at [`REFERENCE_REPS`].
pub fn reference_table(name: &str) -> Result<ExperimentTable> {
    let text = reference_csv(&name.to_ascii_lowercase()).ok_or_else(|| Error::Lookup {
        kind: "reference table",
        name: name.into(),
        valid: super::BUILTIN_EXPERIMENTS[1..].join(", "),
    })?;
    ExperimentTable::from_csv(text, REFERENCE_REPS)
}

#[derive(Deserialize)]
struct AcfRecord {
    k: usize,
    #[serde(rename = "gamma_T")]
    gamma_t: f64,
    gamma_hat: f64,
    gamma_hat_corrected: f64,
    gamma_dk: f64,
}

/// Shipped single-realization autocovariance comparison (standard errors are NaN).
pub fn reference_acf_table() -> Result<Vec<AcfRow>> {
    let text = include_str!("../../data/reference/table1.csv");
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.deserialize::<AcfRecord>()
        .map(|r| {
            let r = r.map_err(csv_err)?;
            Ok(AcfRow {
                k: r.k,
                gamma_t: r.gamma_t,
                gamma_hat: r.gamma_hat,
                gamma_hat_se: f64::NAN,
                corrected: r.gamma_hat_corrected,
                corrected_se: f64::NAN,
                gamma_dk: r.gamma_dk,
                gamma_dk_se: f64::NAN,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_tables_load_with_expected_shapes() {
        let t2 = reference_table("table2").unwrap();
        assert_eq!(t2.rows.len(), 7);
        assert_eq!(t2.deltas(), vec![0.0, 0.05, 0.1, 0.15, 0.25, 1.0, 1.5]);
        assert_eq!(t2.rate("nw87", 0.0), Some(0.209));
        assert_eq!(t2.rate("kvb", 0.0), Some(0.004));
        assert_eq!(reference_table("table4").unwrap().rate("a91", 0.25), Some(0.996));
        assert_eq!(reference_table("table6_2").unwrap().rate("dk-pw-approx", 5.0), Some(0.969));
        assert_eq!(reference_table("table6_1").unwrap().deltas(), vec![0.0, 0.2, 0.5, 2.0, 5.0, 10.0]);
        assert!(reference_table("table9").is_err());
        assert_eq!(reference_acf_table().unwrap().len(), 5);
    }

    #[test]
    fn csv_round_trip() {
        let t = reference_table("table3").unwrap();
        let back = ExperimentTable::from_csv(&t.to_csv().unwrap(), 1).unwrap();
        assert_eq!(back.rows, t.rows);
        assert!(t.to_csv().unwrap().starts_with("table,method,delta,reject_rate,mc_se,reps,base_seed\n"));
    }

    #[test]
    fn ragged_grid_is_a_schema_error() {
        let text = "table,method,delta,reject_rate\nx,a,0,0.1\nx,a,1,0.2\nx,b,0,0.1\n";
        assert!(matches!(ExperimentTable::from_csv(text, 100), Err(Error::Schema(_))));
    }
}
