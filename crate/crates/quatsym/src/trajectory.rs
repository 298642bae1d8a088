// SPDX-License-Identifier: Apache-2.0

//! Trajectory CSV files.
//!
//! A file starts with `# key=value` lines echoing the run configuration,
//! followed by a CSV table with header `step,t,z1,...,z2n,H,Hhat,iters,residual`.

use std::io::{Read, Write};

use quatsym_core::integrator::Trajectory;

use crate::error::{Error, Result};
use crate::matrix_io::format_f64;
use crate::run::RunHeader;

pub fn column_names(dim: usize) -> Vec<String> {
    let mut cols = vec!["step".to_string(), "t".to_string()];
    cols.extend((1..=dim).map(|i| format!("z{i}")));
    cols.extend(["H", "Hhat", "iters", "residual"].map(String::from));
    cols
}

pub fn write_comment_header<W: Write>(out: &mut W, header: &RunHeader) -> std::io::Result<()> {
    for (k, v) in header.entries() {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

pub fn write_trajectory<W: Write>(mut out: W, header: &RunHeader, traj: &Trajectory) -> Result<()> {
    write_comment_header(&mut out, header).map_err(csv::Error::from)?;
    let dim = traj.states.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(column_names(dim))?;
    for (k, ((t, z), d)) in traj
        .times
        .iter()
        .zip(&traj.states)
        .zip(&traj.diagnostics)
        .enumerate()
    {
        let mut rec = vec![k.to_string(), format_f64(*t)];
        rec.extend(z.iter().map(|&x| format_f64(x)));
        rec.push(format_f64(d.energy));
        rec.push(format_f64(d.surrounding_energy));
        rec.push(d.iterations.to_string());
        rec.push(format_f64(d.residual));
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// A trajectory file read back as its comment header and a numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub header: RunHeader,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TrajectoryTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn read_trajectory<R: Read>(mut input: R) -> Result<TrajectoryTable> {
    let mut text = String::new();
    input.read_to_string(&mut text).map_err(csv::Error::from)?;
    let mut header = RunHeader::default();
    for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
        let (k, v) = line.trim().split_once('=').ok_or_else(|| {
            Error::input(
                "trajectory header",
                format!("expected key=value, got {line:?}"),
            )
        })?;
        header.set(k, v);
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let columns: Vec<String> = reader.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::input("trajectory", format!("bad number {f:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(TrajectoryTable {
        header,
        columns,
        rows,
    })
}
