//! Whitespace-separated column files for gnuplot.

use crate::output::{read_table, ParsedTable, SCHEMA};
use anyhow::{anyhow, bail, ensure, Context, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    /// Rank against mean error with standard-error bars.
    Convergence,
    /// One block per style: q against both log sides and the margin.
    Rn,
}

impl PlotKind {
    fn table(self) -> &'static str {
        match self {
            PlotKind::Convergence => "convergence",
            PlotKind::Rn => "rn",
        }
    }
}

fn col(t: &ParsedTable, name: &str, file: &Path) -> Result<usize> {
    t.column(name).ok_or_else(|| anyhow!("{}: schema mismatch, no `{name}` column", file.display()))
}

fn convergence(t: &ParsedTable, file: &Path) -> Result<String> {
    let (n, m, se) = (col(t, "n", file)?, col(t, "mean_error", file)?, col(t, "se", file)?);
    let mut out = String::from("# n mean_error se\n");
    for r in &t.rows {
        writeln!(out, "{} {} {}", r[n], r[m], r[se])?;
    }
    Ok(out)
}

fn rn(t: &ParsedTable, file: &Path) -> Result<String> {
    let style = col(t, "style", file)?;
    let (q, lhs, rhs, margin) =
        (col(t, "q", file)?, col(t, "lhs_log", file)?, col(t, "rhs_log", file)?, col(t, "log_margin", file)?);
    let mut styles: Vec<&str> = Vec::new();
    for r in &t.rows {
        if !styles.contains(&r[style].as_str()) {
            styles.push(&r[style]);
        }
    }
    let mut out = String::new();
    for (i, s) in styles.iter().enumerate() {
        if i > 0 {
            // two blank lines separate gnuplot data blocks
            out.push_str("\n\n");
        }
        writeln!(out, "# style={s}\n# q lhs_log rhs_log margin")?;
        for r in t.rows.iter().filter(|r| r[style] == *s) {
            writeln!(out, "{} {} {} {}", r[q], r[lhs], r[rhs], r[margin])?;
        }
    }
    Ok(out)
}

/// Converts each report into `<out>/<stem>.dat`; rewriting gives identical
/// bytes.
pub fn emit_plotdata(files: &[PathBuf], kind: PlotKind, out: &Path) -> Result<Vec<PathBuf>> {
    ensure!(!files.is_empty(), "no report files given");
    let mut parsed = Vec::new();
    for f in files {
        ensure!(f.is_file(), "{}: no such report file", f.display());
        let t = read_table(f)?;
        if t.schema != SCHEMA {
            bail!("{}: schema {} is not supported (expected {SCHEMA})", f.display(), t.schema);
        }
        if t.kind != kind.table() {
            bail!("{}: schema mismatch, table is `{}` but `{}` was requested", f.display(), t.kind, kind.table());
        }
        parsed.push(t);
    }
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut written = Vec::new();
    for (f, t) in files.iter().zip(&parsed) {
        let text = match kind {
            PlotKind::Convergence => convergence(t, f)?,
            PlotKind::Rn => rn(t, f)?,
        };
        let stem = f.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
        let path = out.join(format!("{stem}.dat"));
        std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}
