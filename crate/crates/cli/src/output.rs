//! Versioned CSV tables and JSON manifests.

use anyhow::{Context, Result};
use kolmo_core::harness::{CheckVerdict, InequalityReport, Scale};
use serde::Serialize;
use std::path::{Path, PathBuf};

pub const SCHEMA: u32 = 1;

/// Linear values are replaced by this marker when `|ln v| > 700`.
pub const OVERFLOW: &str = "OVERFLOW";
const LOG_LIMIT: f64 = 700.0;

/// 17 significant digits, `.` decimal separator.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Linear value given through its logarithm.
pub fn linear_from_log(log: f64) -> String {
    if log.abs() > LOG_LIMIT && log.is_finite() {
        OVERFLOW.into()
    } else {
        num(log.exp())
    }
}

fn log_of(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else if v == 0.0 {
        f64::NEG_INFINITY
    } else {
        f64::NAN
    }
}

/// A table of string cells with a fixed header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub kind: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(kind: &str, header: &[&str]) -> Self {
        Table { kind: kind.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = format!("# schema={SCHEMA}\n# table={}\n", self.kind);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        text.push_str(std::str::from_utf8(&w.into_inner()?)?);
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}

/// A parsed report table.
#[derive(Debug, Clone)]
pub struct ParsedTable {
    pub schema: u32,
    pub kind: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ParsedTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn read_table(path: &Path) -> Result<ParsedTable> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut schema = None;
    let mut kind = None;
    let mut body = String::new();
    for line in text.lines() {
        if let Some(c) = line.strip_prefix('#') {
            let c = c.trim();
            if let Some(v) = c.strip_prefix("schema=") {
                schema = Some(v.parse::<u32>().with_context(|| format!("{}: bad schema line", path.display()))?);
            } else if let Some(v) = c.strip_prefix("table=") {
                kind = Some(v.to_string());
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let schema = schema.with_context(|| format!("{}: missing `# schema=` line", path.display()))?;
    let kind = kind.with_context(|| format!("{}: missing `# table=` line", path.display()))?;
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers()?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()
        .with_context(|| format!("{}: malformed CSV", path.display()))?;
    Ok(ParsedTable { schema, kind, header, rows })
}

#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq, Eq)]
pub struct Counts {
    pub rows: usize,
    pub holds: usize,
    pub violated: usize,
    pub inconclusive: usize,
}

impl Counts {
    pub fn add(&mut self, v: CheckVerdict) {
        self.rows += 1;
        match v {
            CheckVerdict::Holds => self.holds += 1,
            CheckVerdict::Violated => self.violated += 1,
            CheckVerdict::Inconclusive => self.inconclusive += 1,
        }
    }

    pub fn merge(&mut self, o: &Counts) {
        self.rows += o.rows;
        self.holds += o.holds;
        self.violated += o.violated;
        self.inconclusive += o.inconclusive;
    }

    /// 0 with no violation, 2 with any, 3 with only inconclusive failures.
    pub fn status(&self) -> i32 {
        if self.violated > 0 {
            2
        } else if self.inconclusive > 0 {
            3
        } else {
            0
        }
    }
}

fn side_cells(scale: Scale, value: f64, lo: f64, hi: f64) -> [String; 4] {
    let (linear, log) = match scale {
        Scale::Log => (linear_from_log(value), value),
        Scale::Linear => (num(value), log_of(value)),
    };
    [linear, num(log), num(lo), num(hi)]
}

/// Numeric parameters (or space-separated lists of them) in the 17-digit
/// format; anything else verbatim.
fn param_cell(v: &str) -> String {
    let parsed: Option<Vec<f64>> = v.split(' ').map(|t| t.parse::<f64>().ok()).collect();
    match parsed {
        Some(xs) if !v.is_empty() => xs.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" "),
        _ => v.to_string(),
    }
}

/// One row per report. Parameter columns are the union of keys, in order of
/// first appearance; lower and upper bounds are in the report scale.
pub fn report_table(kind: &str, extra: &[&str], reports: &[(Vec<String>, InequalityReport)]) -> (Table, Counts) {
    let mut keys: Vec<String> = Vec::new();
    for (_, r) in reports {
        for (k, _) in &r.params {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    let mut header: Vec<&str> = vec!["name"];
    header.extend_from_slice(extra);
    header.extend_from_slice(&[
        "verdict", "scale", "lhs", "lhs_log", "lhs_lo", "lhs_hi", "rhs", "rhs_log", "rhs_lo", "rhs_hi", "log_margin",
        "samples", "seed",
    ]);
    header.extend(keys.iter().map(String::as_str));
    header.push("note");
    let mut table = Table::new(kind, &header);
    let mut counts = Counts::default();
    for (ex, r) in reports {
        counts.add(r.verdict);
        let mut row = vec![r.name.clone()];
        row.extend(ex.iter().cloned());
        row.push(r.verdict.to_string());
        row.push(r.scale.to_string());
        row.extend(side_cells(r.scale, r.lhs.value, r.lhs.lo, r.lhs.hi));
        row.extend(side_cells(r.scale, r.rhs.value, r.rhs.lo, r.rhs.hi));
        row.push(num(r.rhs_log() - r.lhs_log()));
        row.push(r.samples.to_string());
        row.push(r.seed.map(|s| s.to_string()).unwrap_or_default());
        for k in &keys {
            row.push(r.params.iter().find(|(pk, _)| pk == k).map(|(_, v)| param_cell(v)).unwrap_or_default());
        }
        row.push(r.note.clone().unwrap_or_default());
        table.push(row);
    }
    (table, counts)
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema: u32,
    pub kind: &'a str,
    pub config: &'a C,
    pub seed: u64,
    pub workers: Option<usize>,
    pub wall_time_s: f64,
    pub outputs: Vec<PathBuf>,
    pub counts: Counts,
    pub status: i32,
}

pub fn write_manifest<C: Serialize>(path: &Path, m: &Manifest<C>) -> Result<()> {
    let text = serde_json::to_string_pretty(m)?;
    std::fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}
