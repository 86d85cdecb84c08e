//! Report serialization: JSON with 17 significant digits, CSV with the
//! manifest carried as leading `#` comment lines.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const MANIFEST_PREFIX: &str = "# manifest: ";

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
}

/// Formats a float with 17 significant digits; non-finite values become
/// `null` in JSON.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // keep the sign out of -0
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize, out: &mut String| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                match n.as_f64() {
                    Some(x) if x.is_finite() => out.push_str(&fmt_f64(x)),
                    _ => out.push_str("null"),
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // rows of scalars stay on one line
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(indent + 2, out);
                write_value(x, indent + 2, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                pad(indent + 2, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(x, indent + 2, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

pub fn to_value<T: Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Runtime(format!("serialize: {e}")))
}

/// `{"manifest": ..., <body keys>...}`
pub fn json_report(manifest: &RunManifest, body: Value) -> CliResult<String> {
    let mut map = serde_json::Map::new();
    map.insert("manifest".into(), to_value(manifest)?);
    match body {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("report".into(), other);
        }
    }
    Ok(to_json_string(&Value::Object(map)))
}

/// A CSV table preceded by the manifest as a single-line JSON comment.
pub fn csv_report(manifest: &RunManifest, header: &[String], rows: &[Vec<String>]) -> CliResult<String> {
    let mut out = String::new();
    out.push_str(MANIFEST_PREFIX);
    out.push_str(&serde_json::to_string(manifest).map_err(|e| CliError::Runtime(e.to_string()))?);
    out.push('\n');
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Runtime(format!("csv: {e}")))?;
    out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))?);
    Ok(out)
}

/// Recovers the manifest from a JSON or CSV report.
pub fn extract_manifest(text: &str) -> CliResult<RunManifest> {
    if let Some(line) = text.lines().find_map(|l| l.strip_prefix(MANIFEST_PREFIX)) {
        return serde_json::from_str(line).map_err(|e| CliError::Parse(format!("manifest: {e}")));
    }
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("report: {e}")))?;
    let m = v
        .get("manifest")
        .ok_or_else(|| CliError::Parse("report has no manifest".into()))?;
    serde_json::from_value(m.clone()).map_err(|e| CliError::Parse(format!("manifest: {e}")))
}
