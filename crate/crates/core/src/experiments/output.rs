//! CSV and JSON report files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExperimentReport;
use crate::error::{Error, Result};

/// One line of the report table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub case: String,
    pub method: String,
    pub delta_prime: f64,
    pub seed: u64,
    pub tau: f64,
    pub k_delta: usize,
    pub err_phi: f64,
    pub err_t: f64,
    pub delta: f64,
    pub stop_reason: String,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub err_phi: f64,
    pub err_t: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub k: usize,
    pub gamma: f64,
    pub beta: f64,
    pub g_norm: f64,
    pub kappa: f64,
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Serialization(format!("{other:?}")),
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<stem>.csv` (one row per report) and `<stem>.json` (full reports)
/// into `dir`, creating it if needed.
pub fn write_reports(dir: &Path, stem: &str, reports: &[ExperimentReport]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let rows: Vec<ReportRow> = reports.iter().map(ExperimentReport::row).collect();
    write_csv(&dir.join(format!("{stem}.csv")), &rows)?;
    let json = serde_json::to_string_pretty(reports).map_err(|e| Error::Serialization(e.to_string()))?;
    fs::write(dir.join(format!("{stem}.json")), json + "\n")?;
    Ok(())
}

pub fn write_curve_csv(path: &Path, points: &[CurvePoint]) -> Result<()> {
    write_csv(path, points)
}

pub fn write_diagnostics_csv(path: &Path, rows: &[DiagnosticRow]) -> Result<()> {
    write_csv(path, rows)
}
