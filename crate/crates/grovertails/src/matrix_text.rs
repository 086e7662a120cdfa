//! Plain-text matrix dumps: one row per line, entries written as `re,im`
//! and separated by single spaces. `#` lines are comments.

use std::fmt::Write as _;

use grovertails_core::CMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixTextError {
    #[error("line {line}: cannot parse entry {entry:?}")]
    BadEntry { line: usize, entry: String },
    #[error("line {line}: expected {expected} entries, got {got}")]
    RaggedRow {
        line: usize,
        expected: usize,
        got: usize,
    },
}

pub fn write_matrix(m: &CMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(' ');
            }
            let z = m[(i, j)];
            // `{:?}` prints the shortest string that round-trips
            write!(out, "{:?},{:?}", z.re, z.im).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<CMatrix, MatrixTextError> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let row = body
            .split_whitespace()
            .map(|entry| {
                let bad = || MatrixTextError::BadEntry {
                    line,
                    entry: entry.to_string(),
                };
                let (re, im) = entry.split_once(',').ok_or_else(bad)?;
                Ok(Complex64::new(
                    re.parse().map_err(|_| bad())?,
                    im.parse().map_err(|_| bad())?,
                ))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(MatrixTextError::RaggedRow {
                    line,
                    expected: first.len(),
                    got: row.len(),
                });
            }
        }
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    Ok(CMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}
