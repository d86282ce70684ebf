//! Versioned JSON documents and deterministic report formatting.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const VERSION: u64 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope {
    pub schema: String,
    pub version: u64,
    pub payload: Value,
}

/// Input problem: unreadable file, bad JSON, wrong schema or payload shape.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn read_document<T: DeserializeOwned>(text: &str, schema: &str) -> Result<T, InputError> {
    let env: Envelope = serde_json::from_str(text).map_err(|e| InputError(format!("parse error: {e}")))?;
    if env.schema != schema {
        return Err(InputError(format!("expected schema \"{schema}\", found \"{}\"", env.schema)));
    }
    if env.version != VERSION {
        return Err(InputError(format!("unsupported {schema} version {}", env.version)));
    }
    serde_json::from_value(env.payload).map_err(|e| InputError(format!("invalid {schema} payload: {e}")))
}

pub fn envelope<T: Serialize>(schema: &str, payload: &T) -> Value {
    let payload = serde_json::to_value(payload).unwrap_or(Value::Null);
    serde_json::json!({ "schema": schema, "version": VERSION, "payload": payload })
}

/// Pretty JSON with every float written to 17 significant digits.
pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

/// Short human-readable number: at most four decimals, trailing zeros dropped.
pub fn short(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}
