//! CSV and manifest writing. Numeric fields use a fixed 6-significant-digit
//! format so identical runs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::CliError;

/// Format with 6 significant digits, plain decimal notation.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

/// A finished table ready to be written.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent).map_err(|e| CliError::io(path, e))?;
            }
        }
        let mut writer = csv::Writer::from_path(path).map_err(|e| {
            CliError { code: 1, message: format!("cannot write {}: {e}", path.display()) }
        })?;
        writer
            .write_record(&self.header)
            .and_then(|_| self.rows.iter().try_for_each(|r| writer.write_record(r)))
            .and_then(|_| writer.flush().map_err(Into::into))
            .map_err(|e| CliError { code: 1, message: format!("{}: {e}", path.display()) })
    }
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub config: &'a ExperimentConfig,
    pub mode: &'a str,
    pub seed: u64,
    pub version: &'a str,
    pub wall_time_ms: u128,
    pub output: &'a Path,
}

/// Manifest lives next to the CSV with the extension swapped.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("manifest.json")
}

pub fn write_manifest(manifest: &Manifest, path: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError { code: 1, message: format!("manifest serialization: {e}") })?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Best-effort removal of partial outputs after a failure.
pub fn remove_outputs(paths: &[&Path]) {
    for path in paths {
        let _ = fs::remove_file(path);
    }
}
