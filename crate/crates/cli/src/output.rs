//! JSON envelope printed by `--json`.
//!
//! Floats are written with 17 significant digits so every binary64 value
//! survives a print/parse cycle unchanged. Keys are emitted in sorted order,
//! which keeps output byte-identical between runs.

use divdense::format::sig17;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub command: String,
    pub params: Map<String, Value>,
    pub result: Value,
    pub warnings: Vec<String>,
}

impl Envelope {
    pub fn new(command: &str) -> Self {
        Envelope {
            command: command.to_string(),
            params: Map::new(),
            result: Value::Null,
            warnings: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), to_value(&value));
        self
    }
}

pub fn to_value<T: Serialize + ?Sized>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload types serialize to JSON")
}

/// Compact JSON for any serializable value.
pub fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut out = String::new();
    write_value(&to_value(v), &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => out.push_str(&u.to_string()),
            (_, Some(i), _) => out.push_str(&i.to_string()),
            (_, _, Some(f)) => out.push_str(&sig17(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}
