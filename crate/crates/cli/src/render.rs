use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

pub fn render<T: Serialize>(value: &T, format: Format) -> String {
    let json = serde_json::to_value(value).expect("output types serialize");
    match format {
        Format::Json => serde_json::to_string_pretty(&json).expect("values serialize"),
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", &json, &mut lines);
            lines.join("\n")
        }
    }
}

/// One `path: value` line per leaf, with dotted paths for nested objects
/// and bracketed indices for arrays.
fn flatten(path: &str, value: &Value, out: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            for (key, v) in map {
                let child = if path.is_empty() {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                };
                flatten(&child, v, out);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            out.push(format!("{path}: [{}]", joined.join(", ")));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{path}[{i}]"), v, out);
            }
        }
        leaf => out.push(format!("{path}: {}", scalar(leaf))),
    }
}

fn scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}
