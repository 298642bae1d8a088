// SPDX-License-Identifier: Apache-2.0

//! Plain-text matrix files.
//!
//! ```text
//! 2 2
//! 1.0000000000000000e0 0.0000000000000000e0
//! 0.0000000000000000e0 1.0000000000000000e0
//! ```
//!
//! Values are written with 17 significant digits, so a write followed by a
//! read reproduces every entry bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use quatsym_core::Matrix;

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for r in 0..m.rows() {
        let line: Vec<String> = m.row(r).iter().map(|&x| format_f64(x)).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let bad = |msg: String| Error::input("matrix", msg);
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad(format!("bad dimension {t:?}"))))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(bad(format!("expected `rows cols`, got {header:?}")));
    };
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for line in lines {
        seen += 1;
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(
                tok.parse::<f64>()
                    .map_err(|_| bad(format!("bad number {tok:?} on row {seen}")))?,
            );
        }
        if data.len() - before != cols {
            return Err(bad(format!(
                "row {seen} has {} entries, expected {cols}",
                data.len() - before
            )));
        }
    }
    if seen != rows {
        return Err(bad(format!("found {seen} rows, expected {rows}")));
    }
    Matrix::new(rows, cols, data).map_err(|e| bad(e.to_string()))
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(&text).map_err(|e| match e {
        Error::Input { message, .. } => Error::input(path.display().to_string(), message),
        other => other,
    })
}

pub fn write_matrix_file(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_matrix(m)).map_err(|e| Error::io(path, e))
}
