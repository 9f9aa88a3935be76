use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::Format;

/// Version of the CSV columns and the JSON envelopes written by this tool.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(check: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            check: check.to_string(),
            residual,
            tolerance,
            // NaN never passes
            pass: residual <= tolerance,
        }
    }
}

pub fn to_csv(rows: &[CheckRow]) -> String {
    let mut out = String::from("check,residual,tolerance,pass\n");
    for r in rows {
        let _ = writeln!(out, "{},{:e},{:e},{}", r.check, r.residual, r.tolerance, r.pass);
    }
    out
}

pub fn all_pass(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

/// Lists failing rows on stderr.
pub fn report_failures(rows: &[CheckRow]) {
    for r in rows.iter().filter(|r| !r.pass) {
        eprintln!(
            "FAIL {}: residual {:e} exceeds tolerance {:e}",
            r.check, r.residual, r.tolerance
        );
    }
}

/// Writes `json` or the CSV rows depending on the requested format.
pub fn write_output<T: Serialize>(path: &Path, format: Format, json: &T, rows: &[CheckRow]) -> Result<()> {
    let body = match format {
        Format::Json => serde_json::to_string_pretty(json)? + "\n",
        Format::Csv => to_csv(rows),
    };
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}
