//! CSV and JSON reports with the resolved configuration in the header.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flatten a serialized config into `key=value` pairs sorted by key, after the
/// command name.
pub fn config_pairs<C: Serialize>(command: &str, config: &C) -> Result<Vec<(String, String)>> {
    let mut pairs = vec![("command".to_string(), command.to_string())];
    if let serde_json::Value::Object(map) = serde_json::to_value(config)? {
        for (k, v) in map {
            let v = match v {
                serde_json::Value::Null => "none".to_string(),
                serde_json::Value::String(s) => s,
                serde_json::Value::Array(items) => items
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                other => other.to_string(),
            };
            pairs.push((k, v));
        }
    }
    Ok(pairs)
}

/// Render rows either as CSV preceded by `# key=value` lines or as one JSON
/// object `{"config": {...}, "rows": [...]}`.
pub fn render<R: Serialize>(
    format: Format,
    pairs: &[(String, String)],
    timestamp: bool,
    rows: &[R],
) -> Result<Vec<u8>> {
    let mut header = vec![("version".to_string(), env!("CARGO_PKG_VERSION").to_string())];
    if timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        header.push(("timestamp".to_string(), secs.to_string()));
    }
    header.extend(pairs.iter().cloned());
    match format {
        Format::Csv => {
            let mut out = Vec::new();
            for (k, v) in &header {
                writeln!(out, "# {k}={v}")?;
            }
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
            Ok(w.into_inner().map_err(|e| e.into_error())?)
        }
        Format::Json => {
            let config: serde_json::Map<String, serde_json::Value> = header
                .into_iter()
                .map(|(k, v)| (k, serde_json::Value::String(v)))
                .collect();
            let doc = serde_json::json!({ "config": config, "rows": rows });
            let mut out = serde_json::to_vec_pretty(&doc)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Write to `path`, or to stdout when there is none.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
