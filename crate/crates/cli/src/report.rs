//! Run records and their JSON, CSV and plain-text renderings.

use std::fmt::Write;
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Cli;
use crate::commands::CliError;

pub const SCHEMA_VERSION: u32 = 1;
const HUMAN_DIGITS: usize = 10;

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub command: String,
    pub version: String,
    pub config: Value,
    pub payload: Value,
    /// Run-dependent facts kept out of the payload so reruns compare equal.
    pub metadata: Value,
}

impl RunRecord {
    pub fn new(cli: &Cli, config: Value, payload: Value, elapsed: Duration) -> Self {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            command: cli.command.name().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            payload,
            metadata: json!({
                "wall_time_seconds": elapsed.as_secs_f64(),
                "threads": rayon::current_num_threads(),
            }),
        }
    }
}

pub fn render(record: &RunRecord, as_json: bool, csv: Option<&str>) -> Result<String, CliError> {
    if let Some(csv) = csv {
        return Ok(csv.to_string());
    }
    if as_json {
        let mut s = serde_json::to_string_pretty(record).map_err(|e| CliError::Usage(e.to_string()))?;
        s.push('\n');
        return Ok(s);
    }
    let mut out = String::new();
    let _ = writeln!(out, "hlx {} (schema {})", record.command, record.schema_version);
    human(&mut out, &record.payload, 0);
    Ok(out)
}

/// CSV with a `n,value` header.
pub fn csv_rows(rows: impl IntoIterator<Item = (usize, f64)>) -> String {
    let mut s = String::from("n,value\n");
    for (n, v) in rows {
        let _ = writeln!(s, "{n},{v:?}");
    }
    s
}

pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", HUMAN_DIGITS - 1, x).parse().unwrap_or(x);
    format!("{rounded}")
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Number(n) if n.is_u64() || n.is_i64() => Some(n.to_string()),
        Value::Number(n) => Some(format_number(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) if items.iter().all(|i| !i.is_object()) => {
            let parts: Vec<String> = items.iter().map(|i| scalar(i).unwrap_or_default()).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

fn human(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                match scalar(val) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{key}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{key}:");
                        human(out, val, depth + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                let _ = writeln!(out, "{pad}- [{i}]");
                human(out, item, depth + 1);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}
