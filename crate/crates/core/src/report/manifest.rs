use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::{ExperimentConfig, Format};
use crate::ensembles::SeedSpec;
use crate::error::{Error, Result};

/// One output line. `extra` holds command-specific fields.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub command: String,
    pub d: usize,
    pub k: usize,
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
    pub extra: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub d: usize,
    pub k: usize,
    pub seed: SeedSpec,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifySummary {
    pub suite: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    /// Seconds since the Unix epoch at start.
    pub started_at: f64,
    pub wall_clock_seconds: f64,
    pub results: Vec<ResultRow>,
    pub summary: Option<VerifySummary>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.summary.as_ref().is_none_or(|s| s.passed)
    }
}

pub const CSV_HEADER: [&str; 8] = ["command", "d", "k", "value", "stderr", "n", "seed", "extra"];

/// Floats are written with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_body(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.command.clone(),
            r.d.to_string(),
            r.k.to_string(),
            fmt_float(r.value),
            fmt_float(r.stderr),
            r.n.to_string(),
            r.seed.to_string(),
            serde_json::to_string(&r.extra)?,
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

pub fn manifest_json(m: &RunManifest) -> Result<String> {
    let mut s = serde_json::to_string_pretty(m)?;
    s.push('\n');
    Ok(s)
}

/// Writes the results as CSV or the whole manifest as JSON, to `path` or
/// to standard output.
pub fn emit_report(m: &RunManifest, format: Format, path: Option<&Path>) -> Result<()> {
    if m.results.is_empty() {
        return Err(Error::Config("nothing to report: result list is empty".into()));
    }
    let text = match format {
        Format::Csv => csv_body(&m.results)?,
        Format::Json => manifest_json(m)?,
    };
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Checks the documented manifest layout.
pub fn validate_manifest(v: &serde_json::Value) -> Result<()> {
    let bad = |what: &str| Err(Error::Format(format!("manifest: {what}")));
    let obj = match v.as_object() {
        Some(o) => o,
        None => return bad("not an object"),
    };
    for key in ["tool", "version"] {
        if !obj.get(key).is_some_and(|x| x.is_string()) {
            return bad(&format!("'{key}' must be a string"));
        }
    }
    for key in ["started_at", "wall_clock_seconds"] {
        if !obj.get(key).is_some_and(|x| x.is_number()) {
            return bad(&format!("'{key}' must be a number"));
        }
    }
    let cfg = match obj.get("config").and_then(|c| c.as_object()) {
        Some(c) => c,
        None => return bad("'config' must be an object"),
    };
    for key in ["command", "d", "samples", "seed", "format"] {
        if !cfg.contains_key(key) {
            return bad(&format!("config lacks '{key}'"));
        }
    }
    let rows = match obj.get("results").and_then(|r| r.as_array()) {
        Some(r) if !r.is_empty() => r,
        _ => return bad("'results' must be a nonempty array"),
    };
    for row in rows {
        let ok = row.get("command").is_some_and(|x| x.is_string())
            && ["d", "k", "n", "seed"].iter().all(|k| row.get(*k).is_some_and(|x| x.is_u64()))
            && ["value", "stderr"].iter().all(|k| row.get(*k).is_some_and(|x| x.is_number()))
            && row.get("extra").is_some();
        if !ok {
            return bad("malformed result row");
        }
    }
    match obj.get("summary") {
        Some(serde_json::Value::Null) => Ok(()),
        Some(s) if s.get("passed").is_some_and(|x| x.is_boolean()) && s.get("failures").is_some_and(|x| x.is_array()) => {
            Ok(())
        }
        _ => bad("'summary' must be null or carry 'passed' and 'failures'"),
    }
}
