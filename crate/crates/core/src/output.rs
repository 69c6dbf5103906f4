//! CSV/JSON serialisation and atomic file output.
//!
//! Floating-point numbers are written with 17 significant digits so that
//! they round-trip exactly; infinities are written as `inf` / `-inf` (quoted
//! inside JSON).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::Result;
use crate::hardy::OptimalitySweepRow;
use crate::radial::ScanReport;

/// `x` with 17 significant digits, or `inf` / `-inf` / `nan`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// A flat JSON object with keys kept in insertion order.
#[derive(Debug, Default, Clone)]
pub struct JsonObject {
    fields: Vec<(String, String)>,
}

impl JsonObject {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, key: &str, x: f64) -> Self {
        let v = if x.is_finite() {
            fmt_num(x)
        } else {
            format!("\"{}\"", fmt_num(x))
        };
        self.fields.push((key.to_string(), v));
        self
    }

    pub fn int(mut self, key: &str, v: i64) -> Self {
        self.fields.push((key.to_string(), v.to_string()));
        self
    }

    pub fn boolean(mut self, key: &str, v: bool) -> Self {
        self.fields.push((key.to_string(), v.to_string()));
        self
    }

    pub fn string(mut self, key: &str, v: &str) -> Self {
        let quoted = serde_json::to_string(v).expect("strings always serialise");
        self.fields.push((key.to_string(), quoted));
        self
    }

    pub fn render(&self) -> String {
        let body: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("{}:{v}", serde_json::to_string(k).expect("strings always serialise")))
            .collect();
        format!("{{{}}}", body.join(","))
    }
}

/// JSON array of objects, one per line.
pub fn json_array(objects: &[JsonObject]) -> String {
    let rows: Vec<String> = objects.iter().map(|o| format!("  {}", o.render())).collect();
    format!("[\n{}\n]\n", rows.join(",\n"))
}

pub fn sweep_csv(rows: &[OptimalitySweepRow]) -> String {
    let mut out = String::from("m,rayleigh,predicted,gap\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.m,
            fmt_num(r.rayleigh),
            fmt_num(r.predicted),
            fmt_num(r.gap)
        );
    }
    out
}

pub fn scan_csv(report: &ScanReport) -> String {
    let mut out = String::from("epsilon,lambda_min,classification\n");
    for r in &report.rows {
        let _ = writeln!(out, "{},{},{}", fmt_num(r.epsilon), fmt_num(r.lambda_min), report.classification);
    }
    out
}

/// Writes `contents` next to `path` in a temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
