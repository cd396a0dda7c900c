//! CSV output with a commented configuration header.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

/// Tool name and version written into every output header.
pub fn tool_version() -> String {
    format!("polarcm {}", env!("CARGO_PKG_VERSION"))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// `key = value` pairs of every field of `config` in key order, dotted for nested objects.
pub fn config_fields<C: Serialize>(config: &C) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    flatten("", &serde_json::to_value(config)?, &mut out);
    Ok(out)
}

/// Writes `# tool`, one `# key = value` line per config field, then the CSV rows.
pub fn write_csv<W: Write, C: Serialize, R: Serialize>(mut w: W, config: &C, rows: &[R]) -> Result<()> {
    writeln!(w, "# tool = {}", tool_version())?;
    for (k, v) in config_fields(config)? {
        writeln!(w, "# {k} = {v}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    for r in rows {
        csv.serialize(r)?;
    }
    csv.flush()?;
    Ok(())
}

/// [`write_csv`] into a string.
pub fn csv_string<C: Serialize, R: Serialize>(config: &C, rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, config, rows)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}
