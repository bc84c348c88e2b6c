//! CSV and human-readable serialization of tables and reports.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::experiment::ExperimentReport;
use super::oracle::OracleRow;
use super::table::{ConvergenceTable, RateFit};
use crate::error::{Error, Result};
use crate::sharp::{SpectrumReport, VariationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Human,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "human" => Ok(Format::Human),
            other => Err(Error::Configuration(format!("unknown format '{other}', expected csv or human"))),
        }
    }
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const TABLE_HEADER: &str = "eps,measured,reference,abs_err,rel_err";

/// Header line plus one line per row.
pub fn table_csv(table: &ConvergenceTable) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.eps),
            fmt_f64(r.measured),
            fmt_f64(r.reference),
            fmt_f64(r.abs_err),
            fmt_f64(r.rel_err)
        );
    }
    out
}

fn rate_text(rate: RateFit) -> String {
    match rate {
        RateFit::Rate(r) => format!("{r:.4}"),
        RateFit::Saturated => "saturated".into(),
        RateFit::Insufficient => "n/a".into(),
    }
}

/// Aligned table followed by the fitted rate, the checks and the verdict.
pub fn table_human(table: &ConvergenceTable) -> String {
    let mut out = format!("quantity: {}\n", table.quantity);
    let _ = writeln!(out, "{:>12} {:>24} {:>24} {:>12} {:>12}", "eps", "measured", "reference", "abs_err", "rel_err");
    for r in &table.rows {
        let _ = write!(
            out,
            "{:>12.6} {:>24.15e} {:>24.15e} {:>12.3e} {:>12.3e}",
            r.eps, r.measured, r.reference, r.abs_err, r.rel_err
        );
        if let Some(f) = &r.failure {
            let _ = write!(out, "  FAILED: {f}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "fitted_rate: {}", rate_text(table.rate()));
    for c in &table.checks {
        let _ = writeln!(out, "check {}: {} ({})", c.name, if c.passed { "pass" } else { "fail" }, c.detail);
    }
    let _ = writeln!(out, "verdict: {}", if table.passed() { "pass" } else { "fail" });
    out
}

/// Serializes a whole experiment. The CSV form starts with a comment line
/// recording the kind and seed, and precedes each table with its quantity.
pub fn emit(report: &ExperimentReport, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            let _ = writeln!(
                out,
                "# kind={} seed={} surface={} multiplicity={}",
                report.kind, report.seed, report.surface, report.multiplicity
            );
            for t in &report.tables {
                let _ = writeln!(out, "# quantity={}", t.quantity);
                out.push_str(&table_csv(t));
            }
        }
        Format::Human => {
            let _ = writeln!(
                out,
                "experiment {} on {} (seed {}, multiplicity {})\n",
                report.kind, report.surface, report.seed, report.multiplicity
            );
            for t in &report.tables {
                out.push_str(&table_human(t));
                out.push('\n');
            }
            let _ = writeln!(out, "overall verdict: {}", if report.passed() { "pass" } else { "fail" });
        }
    }
    out
}

/// `term,value` rows with a final `total` row.
pub fn variation_csv(report: &VariationReport) -> String {
    let mut out = String::from("term,value\n");
    for (name, v) in &report.breakdown {
        let _ = writeln!(out, "{name},{}", fmt_f64(*v));
    }
    let _ = writeln!(out, "total,{}", fmt_f64(report.value));
    out
}

/// `k,lambda,multiplicity`, one row per eigenvalue cluster.
pub fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut out = String::from("k,lambda,multiplicity\n");
    for (k, c) in report.clusters.iter().enumerate() {
        let _ = writeln!(out, "{k},{},{}", fmt_f64(c.value), c.multiplicity);
    }
    out
}

/// `quantity,analytic,fd_value,fd_order,rel_err`; a saturated order is empty.
pub fn oracle_csv(rows: &[OracleRow]) -> String {
    let mut out = String::from("quantity,analytic,fd_value,fd_order,rel_err\n");
    for r in rows {
        let order = r.fd_order.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{order},{}", r.quantity, fmt_f64(r.analytic), fmt_f64(r.fd_value), fmt_f64(r.rel_err));
    }
    out
}

/// Writes `text` to `path`, reporting the path on failure.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
