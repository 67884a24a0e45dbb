//! `key=value` config files merged into the argument list.

use std::ffi::OsString;
use std::path::Path;

use crate::error::{Error, Result};

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::InvalidSpec(format!(
                "config line {}: expected key=value, got {raw:?}",
                lineno + 1
            )));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(Error::InvalidSpec(format!("config line {}: bad key {k:?}", lineno + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Flags for the config entries whose key is not already on the command line,
/// so that list options are replaced rather than extended.
fn config_flags(pairs: &[(String, String)], given: &[OsString]) -> Vec<OsString> {
    let on_command_line = |k: &str| {
        let flag = format!("--{k}");
        let prefix = format!("--{k}=");
        given.iter().any(|a| {
            let a = a.to_string_lossy();
            a == flag || a.starts_with(&prefix)
        })
    };
    let mut flags = Vec::new();
    for (k, v) in pairs {
        if on_command_line(k) {
            continue;
        }
        match v.as_str() {
            "true" => flags.push(format!("--{k}").into()),
            "false" => {}
            _ => flags.push(format!("--{k}={v}").into()),
        }
    }
    flags
}

/// Removes `--config PATH` from `argv` and splices the file's settings in right
/// after the subcommand. Flags given on the command line win.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            let p = it
                .next()
                .ok_or_else(|| Error::InvalidSpec("--config needs a path".into()))?;
            path = Some(p);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(Path::new(&path))?;
    // argv[0] is the program, argv[1] the subcommand
    let at = rest.len().min(2);
    let tail = rest.split_off(at);
    let flags = config_flags(&parse_config(&text)?, &tail);
    rest.extend(flags);
    rest.extend(tail);
    Ok(rest)
}
