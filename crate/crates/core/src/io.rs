//! CSV formatting and parsing helpers.

use std::io::Read;

use crate::error::{Error, Result};
use crate::sls_models::csv_err;

/// Formats a real with 17 significant digits, which round-trips any `f64`.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        format!("{:.16e}", x)
    }
}

/// Reads the first `n` columns of a headed numeric CSV.
pub fn read_columns<R: Read>(input: R, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut cols = vec![Vec::new(); n];
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        for (j, col) in cols.iter_mut().enumerate() {
            let field = rec
                .get(j)
                .ok_or_else(|| Error::Parse(format!("line {}: expected {n} columns", i + 2)))?;
            let v = field
                .parse()
                .map_err(|_| Error::Parse(format!("line {}, column {}: `{field}` is not a number", i + 2, j + 1)))?;
            col.push(v);
        }
    }
    Ok(cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-7, 123456.789, 1e300, 5e-324, 0.05, 1.0] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_real(0.05), "0.050000000000000003");
    }

    #[test]
    fn reads_named_columns() {
        let cols = read_columns("a,b\n1,2\n3.5,-4\n".as_bytes(), 2).unwrap();
        assert_eq!(cols, vec![vec![1.0, 3.5], vec![2.0, -4.0]]);
        let err = read_columns("a,b\n1,x\n".as_bytes(), 2).unwrap_err();
        assert!(err.to_string().contains("line 2, column 2"), "{err}");
        assert!(read_columns("a\n1\n".as_bytes(), 2).is_err());
    }
}
