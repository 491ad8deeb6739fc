use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{Failure, Format};

/// Version of the JSON and CSV layouts written by this binary.
pub const SCHEMA_VERSION: u32 = 1;

/// Reads a JSON argument: inline when it starts with `{` or `[`, a file path otherwise.
pub fn load_json_arg(arg: &str, what: &str) -> Result<String, Failure> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Failure::Input(format!("cannot read {what} file `{arg}`: {e}")))
}

/// Wraps a report with the schema version and command name.
pub fn envelope<T: Serialize>(command: &str, body: &T) -> Result<Value, Failure> {
    let mut map = Map::new();
    map.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    map.insert("command".into(), Value::from(command));
    match serde_json::to_value(body).map_err(|e| Failure::Check(format!("cannot serialize report: {e}")))? {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("result".into(), other);
        }
    }
    Ok(Value::Object(map))
}

/// `name,value` rows with dotted paths for nested fields.
pub fn flatten_csv(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, v)| walk(&join(k), v, out)),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| walk(&join(&i.to_string()), v, out)),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut rows = Vec::new();
    walk("", value, &mut rows);
    let mut text = String::from("name,value\n");
    for (k, v) in rows {
        text.push_str(&format!("{k},{v}\n"));
    }
    text
}

pub fn write_text(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Check(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Writes a scalar report in the requested format.
pub fn emit(value: &Value, format: Format, out: Option<&PathBuf>) -> Result<(), Failure> {
    let text = match format {
        Format::Json => json_text(value),
        Format::Csv => flatten_csv(value),
    };
    write_text(out.map(|p| p.as_path()), &text)
}

/// Writes a table as CSV (prefixed by a schema comment) or the summary as JSON.
pub fn emit_table(summary: &Value, table: &str, format: Format, out: Option<&PathBuf>, summary_path: Option<&PathBuf>) -> Result<(), Failure> {
    match format {
        Format::Json => write_text(out.map(|p| p.as_path()), &json_text(summary)),
        Format::Csv => {
            write_text(out.map(|p| p.as_path()), &format!("# schema_version={SCHEMA_VERSION}\n{table}"))?;
            if let Some(path) = summary_path {
                write_text(Some(path), &json_text(summary))?;
            }
            Ok(())
        }
    }
}
