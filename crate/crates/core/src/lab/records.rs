use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use crate::dyson::ExpansionReport;
use crate::hartree::TrajectoryPoint;
use crate::linalg::C64;
use crate::Result;

/// One `(N, t)` comparison between the quantum and the classical side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    #[serde(rename = "N")]
    pub big_n: f64,
    pub n: usize,
    pub t: f64,
    pub lhs: C64,
    pub rhs: C64,
    pub abs_err: f64,
    pub marginal_trace_dist: Option<f64>,
    pub wall_ms: f64,
}

impl ResultRecord {
    pub fn new(big_n: f64, n: usize, t: f64, lhs: C64, rhs: C64) -> Self {
        ResultRecord { big_n, n, t, lhs, rhs, abs_err: (lhs - rhs).norm(), marginal_trace_dist: None, wall_ms: 0.0 }
    }
}

/// Least-squares slope of `log abs_err` against `log N` at one time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeSummary {
    pub t: f64,
    pub slope: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub records: Vec<ResultRecord>,
    pub slopes: Vec<SlopeSummary>,
}

impl Sweep {
    /// Zero all timings so repeated runs serialize identically.
    pub fn strip_timing(&mut self) {
        for r in &mut self.records {
            r.wall_ms = 0.0;
        }
    }

    pub fn at_time(&self, t: f64) -> impl Iterator<Item = &ResultRecord> {
        self.records.iter().filter(move |r| r.t == t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn fmt(x: f64) -> String {
    // shortest round-trip representation
    format!("{x:?}")
}

pub const RECORD_COLUMNS: [&str; 10] =
    ["N", "n", "t", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "marginal_trace_dist", "wall_ms"];

pub fn records_csv(records: &[ResultRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.write_record([
            fmt(r.big_n),
            r.n.to_string(),
            fmt(r.t),
            fmt(r.lhs.re),
            fmt(r.lhs.im),
            fmt(r.rhs.re),
            fmt(r.rhs.im),
            fmt(r.abs_err),
            r.marginal_trace_dist.map(fmt).unwrap_or_default(),
            fmt(r.wall_ms),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
}

pub fn trajectory_csv(points: &[TrajectoryPoint]) -> Result<String> {
    let m = points.first().map_or(0, |p| p.psi.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["t".to_string(), "norm".into(), "energy".into()];
    for x in 0..m {
        head.push(format!("psi{x}_re"));
        head.push(format!("psi{x}_im"));
    }
    w.write_record(&head)?;
    for p in points {
        let mut row = vec![fmt(p.t), fmt(p.norm), fmt(p.energy)];
        for z in &p.psi {
            row.push(fmt(z.re));
            row.push(fmt(z.im));
        }
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
}

/// One row per `(N, t, k)`: the norm of the order-`k` contribution and the error of the truncation.
pub fn expansion_csv(reports: &[ExpansionReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["N", "n", "t", "K", "L", "k", "order_norm", "error_vs_exact"])?;
    for r in reports {
        for (k, norm) in r.order_norms.iter().enumerate() {
            w.write_record([
                fmt(r.big_n),
                r.n.to_string(),
                fmt(r.t),
                r.k_max.to_string(),
                r.l_max.to_string(),
                k.to_string(),
                fmt(*norm),
                r.error_vs_exact.map(fmt).unwrap_or_default(),
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Write `text` to `path`, or to stdout for `None` or `-`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, text)?,
        _ => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Records in the requested format.
pub fn emit_results(records: &[ResultRecord], path: Option<&Path>, format: Format) -> Result<()> {
    let text = match format {
        Format::Csv => records_csv(records)?,
        Format::Json => to_json(&records)?,
    };
    emit(&text, path)
}

/// Read records back from CSV written by [`records_csv`].
pub fn read_records_csv(text: &str) -> Result<Vec<ResultRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let f = |i: usize| row[i].parse::<f64>().map_err(|e| crate::Error::config(RECORD_COLUMNS[i], e.to_string()));
        out.push(ResultRecord {
            big_n: f(0)?,
            n: row[1].parse().map_err(|e: std::num::ParseIntError| crate::Error::config("n", e.to_string()))?,
            t: f(2)?,
            lhs: C64::new(f(3)?, f(4)?),
            rhs: C64::new(f(5)?, f(6)?),
            abs_err: f(7)?,
            marginal_trace_dist: if row[8].is_empty() { None } else { Some(f(8)?) },
            wall_ms: f(9)?,
        });
    }
    Ok(out)
}

/// Generic CSV table.
pub fn table_csv<S: AsRef<str>>(header: &[&str], rows: &[Vec<S>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|s| s.as_ref()))?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
}
