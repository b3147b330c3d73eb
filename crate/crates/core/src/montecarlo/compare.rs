use serde::Serialize;

use super::table::ExperimentTable;
use crate::error::{Error, Result};
use crate::io::fmt_real;

/// Gap in reference power treated as a real ordering or a real dip.
const PATTERN_GAP: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellCheck {
    pub method: String,
    pub delta: f64,
    pub observed: f64,
    pub reference: f64,
    /// `tol + 2·√(se_obs² + se_ref²)`.
    pub allowed: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub table: String,
    pub cells: Vec<CellCheck>,
    pub patterns: Vec<PatternCheck>,
}

impl ComparisonReport {
    pub fn cells_passed(&self) -> usize {
        self.cells.iter().filter(|c| c.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass) && self.patterns.iter().all(|p| p.pass)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("method,delta,observed,reference,allowed,pass\n");
        for c in &self.cells {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.method,
                fmt_real(c.delta),
                fmt_real(c.observed),
                fmt_real(c.reference),
                fmt_real(c.allowed),
                c.pass
            ));
        }
        s
    }
}

/// Cell-by-cell comparison plus qualitative pattern checks. `size_tol`
/// applies at `δ = 0`, `power_tol` elsewhere.
pub fn compare_to_reference(
    table: &ExperimentTable,
    reference: &ExperimentTable,
    size_tol: f64,
    power_tol: f64,
) -> Result<ComparisonReport> {
    if table.deltas() != reference.deltas() {
        return Err(Error::Schema(format!(
            "delta grids differ: {:?} vs {:?}",
            table.deltas(),
            reference.deltas()
        )));
    }
    let mut cells = Vec::new();
    for row in &table.rows {
        let ref_row = reference
            .row(&row.method)
            .ok_or_else(|| Error::Schema(format!("method `{}` missing from reference", row.method)))?;
        for (c, r) in row.cells.iter().zip(&ref_row.cells) {
            let tol = if c.delta == 0.0 { size_tol } else { power_tol };
            let allowed = tol + 2.0 * (c.mc_se.powi(2) + r.mc_se.powi(2)).sqrt();
            let pass = (c.reject_rate - r.reject_rate).abs() <= allowed;
            cells.push(CellCheck {
                method: row.method.clone(),
                delta: c.delta,
                observed: c.reject_rate,
                reference: r.reject_rate,
                allowed,
                pass,
            });
        }
    }
    Ok(ComparisonReport { table: table.table.clone(), cells, patterns: pattern_checks(table, reference) })
}

fn pattern_checks(table: &ExperimentTable, reference: &ExperimentTable) -> Vec<PatternCheck> {
    let mut out = Vec::new();
    for row in &table.rows {
        let Some(rr) = reference.row(&row.method) else { continue };
        let power: Vec<_> = row.cells.iter().zip(&rr.cells).filter(|(c, _)| c.delta != 0.0).collect();
        let dips: Vec<f64> = power.windows(2).map(|w| w[0].1.reject_rate - w[1].1.reject_rate).collect();
        let ref_dip = dips.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if power.len() < 2 {
            continue;
        }
        let obs_steps: Vec<(f64, f64)> = power
            .windows(2)
            .map(|w| {
                let se = (w[0].0.mc_se.powi(2) + w[1].0.mc_se.powi(2)).sqrt();
                (w[0].0.reject_rate - w[1].0.reject_rate, se)
            })
            .collect();
        if ref_dip > PATTERN_GAP {
            let pass = obs_steps.iter().any(|&(drop, _)| drop > 0.0);
            out.push(PatternCheck {
                name: format!("{}: power non-monotone in delta", row.method),
                pass,
                detail: format!("largest reference dip {ref_dip:.3}"),
            });
        } else if ref_dip <= 0.0 {
            let worst = obs_steps.iter().map(|&(drop, se)| drop - 2.0 * se).fold(f64::NEG_INFINITY, f64::max);
            out.push(PatternCheck {
                name: format!("{}: power monotone in delta", row.method),
                pass: worst <= PATTERN_GAP,
                detail: format!("largest observed excess dip {worst:.3}"),
            });
        }
    }
    if let (Some(dk), Some(dk_ref)) = (table.row("dk"), reference.row("dk")) {
        for row in table.rows.iter().filter(|r| r.method != "dk") {
            let Some(rr) = reference.row(&row.method) else { continue };
            for (i, c) in row.cells.iter().enumerate().filter(|(_, c)| c.delta != 0.0) {
                let gap_ref = dk_ref.cells[i].reject_rate - rr.cells[i].reject_rate;
                if gap_ref.abs() <= PATTERN_GAP {
                    continue;
                }
                let gap = dk.cells[i].reject_rate - c.reject_rate;
                let se = (dk.cells[i].mc_se.powi(2) + c.mc_se.powi(2)).sqrt();
                out.push(PatternCheck {
                    name: format!("dk vs {} at delta {}", row.method, c.delta),
                    pass: gap * gap_ref.signum() > -2.0 * se,
                    detail: format!("observed gap {gap:.3}, reference gap {gap_ref:.3}"),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::reference_table;

    #[test]
    fn identical_tables_pass() {
        let t = reference_table("table2").unwrap();
        let r = compare_to_reference(&t, &t, 0.0, 0.0).unwrap();
        assert!(r.all_pass());
        assert_eq!(r.cells.len(), 49);
    }

    #[test]
    fn one_bad_cell_fails_alone() {
        let r = reference_table("table3").unwrap();
        let mut t = r.clone();
        t.rows[2].cells[3].reject_rate += 0.5;
        let rep = compare_to_reference(&t, &r, 0.03, 0.1).unwrap();
        let failed: Vec<_> = rep.cells.iter().filter(|c| !c.pass).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].method, "a91");
    }

    #[test]
    fn shape_mismatch_is_schema_error() {
        let a = reference_table("table2").unwrap();
        let b = reference_table("table3").unwrap();
        assert!(matches!(compare_to_reference(&a, &b, 0.03, 0.1), Err(Error::Schema(_))));
    }
}
