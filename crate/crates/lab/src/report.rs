//! Machine-readable run reports.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::error::Result;

pub const SIGNATURE: &str = "(-,+,...,+)";

/// One comparison of a measured quantity with its expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Short tag naming the result being checked, or `plumbing`.
    pub anchor: String,
    pub measured: Value,
    pub expected: Value,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    /// `|measured − expected| ≤ tol · |expected|`.
    pub fn relative(name: impl Into<String>, anchor: &str, measured: f64, expected: f64, tol: f64) -> Self {
        let pass = (measured - expected).abs() <= tol * expected.abs();
        Self::numeric(name, anchor, measured, expected, tol, pass)
    }

    /// `|measured − expected| ≤ tol`.
    pub fn absolute(name: impl Into<String>, anchor: &str, measured: f64, expected: f64, tol: f64) -> Self {
        let pass = (measured - expected).abs() <= tol;
        Self::numeric(name, anchor, measured, expected, tol, pass)
    }

    /// `measured ≤ bound`; the bound is recorded as the tolerance.
    pub fn at_most(name: impl Into<String>, anchor: &str, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            measured: Value::from(measured),
            expected: Value::from(0.0),
            tolerance: Some(bound),
            pass: measured <= bound,
        }
    }

    /// `lo ≤ measured ≤ hi`.
    pub fn within(name: impl Into<String>, anchor: &str, measured: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            measured: Value::from(measured),
            expected: Value::from(vec![lo, hi]),
            tolerance: None,
            pass: (lo..=hi).contains(&measured),
        }
    }

    pub fn exact<T: Into<Value> + PartialEq + Clone>(name: impl Into<String>, anchor: &str, measured: T, expected: T) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            pass: measured == expected,
            measured: measured.into(),
            expected: expected.into(),
            tolerance: None,
        }
    }

    /// A computed value with nothing to compare against.
    pub fn info<T: Into<Value>>(name: impl Into<String>, measured: T) -> Self {
        Self {
            name: name.into(),
            anchor: "plumbing".into(),
            measured: measured.into(),
            expected: Value::Null,
            tolerance: None,
            pass: true,
        }
    }

    fn numeric(name: impl Into<String>, anchor: &str, measured: f64, expected: f64, tol: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            measured: Value::from(measured),
            expected: Value::from(expected),
            tolerance: Some(tol),
            pass: pass && measured.is_finite(),
        }
    }

    /// `PASS name: measured (expected ...)`.
    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {}: measured {}", self.name, self.measured);
        if !self.expected.is_null() {
            s.push_str(&format!(", expected {}", self.expected));
        }
        if let Some(t) = self.tolerance {
            s.push_str(&format!(", tol {t:e}"));
        }
        s
    }
}

/// Plot-ready rows.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// `coord1,...,coordk,value` over grid nodes.
    pub fn nodal(nodes: &[Vec<f64>], values: &[f64]) -> Self {
        let k = nodes.first().map_or(0, Vec::len);
        let mut columns: Vec<String> = (1..=k).map(|i| format!("coord{i}")).collect();
        columns.push("value".into());
        let rows = nodes
            .iter()
            .zip(values)
            .map(|(n, v)| n.iter().copied().chain([*v]).collect())
            .collect();
        Self { columns, rows }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub signature: String,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub data: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    /// Seconds.
    pub wall_time: f64,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Self {
            tool: "horizon".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            signature: SIGNATURE.into(),
            checks: Vec::new(),
            data: Value::Null,
            table: None,
            wall_time: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// JSON with the wall time zeroed, for replay comparison.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.wall_time = 0.0;
        r.to_json()
    }

    /// The table if present, otherwise the checks.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.columns)?;
                for row in &t.rows {
                    w.write_record(row.iter().map(|v| v.to_string()))?;
                }
            }
            None => {
                w.write_record(["name", "anchor", "measured", "expected", "tolerance", "pass"])?;
                for c in &self.checks {
                    w.write_record([
                        c.name.clone(),
                        c.anchor.clone(),
                        c.measured.to_string(),
                        c.expected.to_string(),
                        c.tolerance.map(|t| t.to_string()).unwrap_or_default(),
                        c.pass.to_string(),
                    ])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_constructors() {
        assert!(Check::relative("a", "x", 1.0 + 1e-7, 1.0, 1e-6).pass);
        assert!(!Check::relative("a", "x", 1.1, 1.0, 1e-6).pass);
        assert!(!Check::absolute("a", "x", f64::NAN, 0.0, 1.0).pass);
        assert!(Check::within("a", "x", 4.0, 3.5, 4.5).pass);
        assert!(!Check::exact("a", "x", "Trapped", "Extremal").pass);
        assert!(Check::at_most("a", "x", 0.5, 1.0).pass);
        assert!(Check::relative("a", "x", 2.0, 2.0, 1e-6).line().starts_with("PASS a"));
    }

    #[test]
    fn csv_layouts() {
        let mut r = Report::new(RunConfig::default());
        r.checks.push(Check::info("n", 3));
        assert!(r.to_csv().unwrap().starts_with("name,anchor,measured"));
        r.table = Some(Table::nodal(&[vec![0.0, 1.0], vec![0.5, 1.5]], &[2.0, 3.0]));
        let csv = r.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("coord1,coord2,value"));
        assert_eq!(lines.next(), Some("0,1,2"));
    }

    #[test]
    fn canonical_json_ignores_wall_time() {
        let mut a = Report::new(RunConfig::default());
        let mut b = a.clone();
        a.wall_time = 1.0;
        b.wall_time = 2.0;
        assert_ne!(a.to_json(), b.to_json());
        assert_eq!(a.canonical_json(), b.canonical_json());
        let back: Report = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
