//! Report records, JSON output and the stdout summary table.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "lieharm-verify";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub residual: f64,
    pub pass: bool,
    /// Wall time in milliseconds.
    pub ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Data needed to replay the worst sample of a failing check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Record {
    pub fn new(name: impl Into<String>, residual: f64, pass: bool) -> Self {
        Record { name: name.into(), params: BTreeMap::new(), residual, pass, ms: 0, note: None, witness: None }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Sort key: name, then the serialized parameters.
    fn sort_key(&self) -> (String, String) {
        (self.name.clone(), serde_json::to_string(&self.params).unwrap_or_default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub config: Value,
    pub records: Vec<Record>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(config: Value, mut records: Vec<Record>, warnings: Vec<String>, timestamp: u64) -> Self {
        records.sort_by_key(Record::sort_key);
        let pass = records.iter().all(|r| r.pass);
        VerificationReport {
            schema: SCHEMA_VERSION,
            tool: TOOL_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp,
            config,
            records,
            warnings,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Fixed-width table: status, name, parameters, residual, wall time.
    pub fn summary_table(&self) -> String {
        let rows: Vec<[String; 5]> = self
            .records
            .iter()
            .map(|r| {
                let params = r
                    .params
                    .iter()
                    .map(|(k, v)| match v {
                        Value::String(s) => format!("{k}={s}"),
                        other => format!("{k}={other}"),
                    })
                    .collect::<Vec<_>>()
                    .join(" ");
                [
                    if r.pass { "PASS" } else { "FAIL" }.to_string(),
                    r.name.clone(),
                    params,
                    format!("{:.3e}", r.residual),
                    format!("{}ms", r.ms),
                ]
            })
            .collect();
        let header = ["status", "check", "params", "residual", "time"].map(String::from);
        let mut widths = header.clone().map(|h| h.len());
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String; 5]| {
            let mut s = String::new();
            for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                s.push_str(&format!("{cell:<w$}"));
            }
            s.trim_end().to_string() + "\n"
        };
        let mut out = line(&header);
        for row in &rows {
            out.push_str(&line(row));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        let failed = self.failures().count();
        out.push_str(&format!(
            "{}: {} checks, {} failed\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.records.len(),
            failed
        ));
        out
    }
}

/// Writes the report as pretty-printed JSON.
pub fn report_write(report: &VerificationReport, path: &Path) -> Result<()> {
    std::fs::write(path, report.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
