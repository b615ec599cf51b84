//! Report assembly: deterministic JSON envelopes and CSV tables.

use serde::Serialize;
use serde_json::{json, Value};

use crate::REPORT_SCHEMA;

/// One executed check inside a scenario report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub details: Value,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// Wraps a payload into the versioned envelope. Key order inside maps is
/// alphabetical (serde_json's default), so two runs with equal inputs emit
/// byte-identical documents; no timestamps are embedded.
pub fn envelope(command: &str, seed: u64, jet_order: usize, status: &str, payload: Value) -> Value {
    json!({
        "schema": REPORT_SCHEMA,
        "command": command,
        "seed": seed,
        "jet_order": jet_order,
        "status": status,
        "payload": payload,
    })
}

pub fn to_pretty(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable");
    out.push('\n');
    out
}

/// Minimal CSV writer; all emitted fields are numbers or bare words.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn f(x: f64) -> String {
    format!("{x:.17e}")
}
