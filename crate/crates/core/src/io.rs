//! CSV plumbing shared by the data types and the command line.
//!
//! Floats are written in their shortest round-trip form, so reading a file
//! back reproduces every value bit for bit and identical inputs give
//! byte-identical files.

use std::io::{Read, Write};

use crate::{Error, Result};

/// Shortest representation that parses back to the same `f64`.
///
/// Plain decimal notation for `1e-5 <= |v| < 1e16`, scientific otherwise.
/// Both zeros print as `0`.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn write_csv<W, I>(writer: W, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(header)?;
    for row in rows {
        out.write_record(row.as_ref().iter().map(|&v| format_float(v)))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a headed numeric CSV. Columns are matched by name, in the order of
/// `columns`; extra columns are ignored.
pub fn read_csv_columns<R: Read>(reader: R, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut input = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = input.headers()?.clone();
    let positions: Vec<usize> = columns
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| Error::Input(format!("missing column '{name}'")))
        })
        .collect::<Result<_>>()?;
    let mut out = vec![Vec::new(); columns.len()];
    for (line, record) in input.records().enumerate() {
        let record = record?;
        for (c, &p) in positions.iter().enumerate() {
            let field = record.get(p).unwrap_or("");
            let v: f64 = field.parse().map_err(|_| {
                Error::Input(format!("row {}: '{field}' in column '{}' is not a number", line + 1, columns[c]))
            })?;
            out[c].push(v);
        }
    }
    Ok(out)
}
