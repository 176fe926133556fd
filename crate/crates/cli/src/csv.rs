//! Sweep results as CSV.
//!
//! Header `n,k,metric_mean,metric_stderr,predicted,trials,noise_floor`,
//! reals in scientific notation with 12 significant digits, an empty
//! `noise_floor` field when the sweep has none, `\n` line endings.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use sic_core::SweepRow;

pub const HEADER: &str = "n,k,metric_mean,metric_stderr,predicted,trials,noise_floor";

/// 12 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn format_row(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        row.n,
        row.k,
        format_real(row.metric_mean),
        format_real(row.metric_stderr),
        format_real(row.predicted),
        row.trials,
        row.noise_floor.map(format_real).unwrap_or_default(),
    )
}

pub fn write_rows<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for row in rows {
        writeln!(out, "{}", format_row(row))?;
    }
    out.flush()
}

pub fn write_csv(rows: &[SweepRow], path: &Path) -> io::Result<()> {
    write_rows(rows, BufWriter::new(File::create(path)?))
}
