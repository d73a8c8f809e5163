//! Result files: CSV for tables, JSON for scalar summaries.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// 17 significant digits, enough to round-trip an `f64`.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn target(prefix: &Path, ext: &str) -> Result<PathBuf, CliError> {
    let mut name = prefix.as_os_str().to_owned();
    name.push(ext);
    let path = PathBuf::from(name);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))?;
    }
    Ok(path)
}

/// Writes `prefix.csv` with the given header; `None` cells are left empty.
pub fn write_csv(prefix: &Path, header: &[&str], rows: &[Vec<Option<f64>>]) -> Result<PathBuf, CliError> {
    let path = target(prefix, ".csv")?;
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.map(float).unwrap_or_default()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write(&path, out.as_bytes())?;
    Ok(path)
}

pub fn write_json<S: Serialize>(prefix: &Path, value: &S) -> Result<PathBuf, CliError> {
    let path = target(prefix, ".json")?;
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Output(format!("cannot serialize summary: {e}")))?;
    text.push('\n');
    write(&path, text.as_bytes())?;
    Ok(path)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
}
