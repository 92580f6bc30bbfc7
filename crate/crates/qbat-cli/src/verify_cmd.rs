//! Verification command: runs the seeded check suite and reports one line
//! per check.
//!
//! The human-readable summary goes to stderr; the machine-readable report
//! (CSV or JSON) goes to the output path or stdout, so piped output stays
//! parseable. Reruns with the same seed and instance count are
//! byte-identical regardless of worker count.

use crate::config::OutputFormat;
use crate::error::{CliError, CliResult};
use qbat_core::verify::{self, CheckReport};
use serde::Serialize;
use std::io::{self, Write};

/// Report columns, in emission order.
const COLUMNS: [&str; 6] = [
    "check_name",
    "instances",
    "failures",
    "worst_margin",
    "tolerance",
    "seed",
];

/// Resolves a suite selector into check names; `all` selects every check.
pub fn select_checks(suite: &str) -> CliResult<Vec<&'static str>> {
    if suite == "all" {
        return Ok(verify::CHECK_NAMES.to_vec());
    }
    verify::CHECK_NAMES
        .iter()
        .find(|&&name| name == suite)
        .map(|&name| vec![name])
        .ok_or_else(|| {
            CliError::Config(format!(
                "unknown check {suite:?}; expected all or one of {}",
                verify::CHECK_NAMES.join(", ")
            ))
        })
}

/// Runs the selected checks in order.
pub fn run_checks(
    names: &[&'static str],
    instances: Option<usize>,
    seed: u64,
) -> CliResult<Vec<CheckReport>> {
    names
        .iter()
        .map(|name| verify::run_check(name, instances, seed).map_err(CliError::from_run_stage))
        .collect()
}

/// One machine-readable report row.
#[derive(Serialize)]
struct Row<'a> {
    check_name: &'a str,
    instances: usize,
    failures: usize,
    worst_margin: f64,
    tolerance: f64,
    seed: u64,
}

impl<'a> Row<'a> {
    fn new(report: &'a CheckReport) -> Self {
        Self {
            check_name: &report.check_name,
            instances: report.instances,
            failures: report.failures,
            worst_margin: report.worst_margin,
            tolerance: report.tolerance,
            seed: report.seed,
        }
    }
}

/// Writes the machine-readable report.
pub fn write_report<W: Write + ?Sized>(
    out: &mut W,
    reports: &[CheckReport],
    format: OutputFormat,
) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{}", COLUMNS.join(","))?;
            for r in reports {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.check_name, r.instances, r.failures, r.worst_margin, r.tolerance, r.seed
                )?;
            }
            Ok(())
        }
        OutputFormat::Json => {
            let rows: Vec<Row> = reports.iter().map(Row::new).collect();
            serde_json::to_writer_pretty(&mut *out, &rows).map_err(io::Error::other)?;
            writeln!(out)
        }
    }
}

/// Writes the human-readable summary table and a final verdict line.
pub fn write_summary<W: Write>(out: &mut W, reports: &[CheckReport]) -> io::Result<()> {
    writeln!(
        out,
        "{:<8} {:>9} {:>8} {:>13} {:>10}  status",
        "check", "instances", "failures", "worst_margin", "tolerance"
    )?;
    for r in reports {
        writeln!(
            out,
            "{:<8} {:>9} {:>8} {:>13.3e} {:>10.1e}  {}",
            r.check_name,
            r.instances,
            r.failures,
            r.worst_margin,
            r.tolerance,
            if r.passed() { "pass" } else { "FAIL" }
        )?;
    }
    let verdict = if reports.iter().all(CheckReport::passed) {
        "all checks passed"
    } else {
        "VERIFICATION FAILED"
    };
    writeln!(out, "{verdict}")
}

/// Details for each failing instance, for post-mortem on a failed run.
pub fn write_failures<W: Write>(out: &mut W, reports: &[CheckReport]) -> io::Result<()> {
    for r in reports.iter().filter(|r| !r.passed()) {
        for inst in r.details.iter().filter(|d| d.margin < -r.tolerance) {
            writeln!(
                out,
                "{} instance {} margin {:.6e}: {}",
                r.check_name, inst.index, inst.margin, inst.description
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_selection_accepts_all_and_single_names() {
        assert_eq!(
            select_checks("all").unwrap().len(),
            verify::CHECK_NAMES.len()
        );
        assert_eq!(select_checks("thm2").unwrap(), vec!["thm2"]);
        assert_eq!(select_checks("thm9").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn report_rows_are_csv_with_header() {
        let reports = run_checks(&["case1"], None, 7).unwrap();
        let mut buf = Vec::new();
        write_report(&mut buf, &reports, OutputFormat::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
        let row = lines.next().unwrap();
        assert!(row.starts_with("case1,"));
        assert!(row.ends_with(",7"));
    }

    #[test]
    fn json_report_round_trips() {
        let reports = run_checks(&["case1"], None, 3).unwrap();
        let mut buf = Vec::new();
        write_report(&mut buf, &reports, OutputFormat::Json).unwrap();
        let rows: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(rows[0]["check_name"], "case1");
        assert_eq!(rows[0]["failures"], 0);
    }

    #[test]
    fn summary_marks_passing_checks() {
        let reports = run_checks(&["case1"], None, 7).unwrap();
        let mut buf = Vec::new();
        write_summary(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("pass"));
        assert!(text.contains("all checks passed"));
    }
}
