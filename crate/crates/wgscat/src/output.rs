//! CSV tables and the JSON metadata sidecar.

use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

/// Fixed float format: nine significant digits, scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner()
            .map_err(|e| CliError::Io("csv buffer".into(), e.into_error()))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_bytes()?).map_err(|e| CliError::Io(path.display().to_string(), e))
    }
}

/// Per-point record kept in the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub label: String,
    pub unitarity_defect: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub csv: String,
    pub columns: &'static [&'static str],
    pub points: &'a [PointRecord],
    pub failed_points: usize,
    pub max_unitarity_defect: Option<f64>,
    pub wall_time_s: f64,
    pub notes: &'a [String],
}

pub fn write_metadata(path: &Path, meta: &Metadata<'_>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(meta)?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(path.display().to_string(), e))
}
