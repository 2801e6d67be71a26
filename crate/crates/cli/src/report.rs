//! Run reports: canonical JSON (sorted keys, 17 significant digits) and a
//! one-line-per-task text summary.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub index: usize,
    pub kind: String,
    pub object: Option<String>,
    /// Parameters after defaults were applied.
    pub params: Value,
    pub seed: u64,
    pub status: TaskStatus,
    pub summary: String,
    pub outputs: Value,
    pub error: Option<String>,
}

/// Wall-clock data, kept apart from the deterministic payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub spec_digest: String,
    pub seed: u64,
    pub results: Vec<TaskResult>,
    pub warnings: Vec<String>,
    pub metadata: Metadata,
}

impl Report {
    pub fn failed(&self) -> bool {
        self.results.iter().any(|r| r.status == TaskStatus::Failed)
    }

    /// The report without its metadata block, for determinism checks.
    pub fn payload(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(m) = &mut v {
            m.remove("metadata");
        }
        sanitize(v)
    }
}

/// JSON number for a float; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    } else {
        Value::String(foliation_core::transversality::format_17(x))
    }
}

fn sanitize(v: Value) -> Value {
    match v {
        Value::Array(a) => Value::Array(a.into_iter().map(sanitize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, sanitize(v))).collect()),
        other => other,
    }
}

fn write_string(out: &mut String, s: &str) {
    out.push_str(&serde_json::to_string(s).expect("string serializes"));
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, k: usize| out.extend(std::iter::repeat_n(' ', 2 * k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&foliation_core::transversality::format_17(n.as_f64().unwrap()));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => write_string(out, s),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (k, x) in a.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, x, indent + 1);
                if k + 1 < a.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                pad(out, indent + 1);
                write_string(out, key);
                out.push_str(": ");
                write_value(out, &m[*key], indent + 1);
                if k + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Canonical JSON text of any value.
pub fn to_canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

pub fn emit_json(report: &Report) -> String {
    to_canonical_json(&serde_json::to_value(report).expect("report serializes"))
}

pub fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    for r in &report.results {
        let _ = match r.status {
            TaskStatus::Ok => writeln!(out, "{}: {}", r.kind, r.summary),
            TaskStatus::Failed => writeln!(out, "{}: FAILED ({})", r.kind, r.error.as_deref().unwrap_or("")),
        };
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn parse_report(s: &str) -> serde_json::Result<Report> {
    serde_json::from_str(s)
}

/// Builder for task outputs.
#[derive(Debug, Default)]
pub struct Outputs(Map<String, Value>);

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), v.into());
        self
    }

    pub fn float(self, key: &str, x: f64) -> Self {
        self.set(key, num(x))
    }

    pub fn build(self) -> Value {
        Value::Object(self.0)
    }
}
