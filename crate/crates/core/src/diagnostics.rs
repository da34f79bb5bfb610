//! Run diagnostics and exports: Fejér distance series, descent checks, and
//! CSV/JSON writers.
//!
//! Files are written to a temporary sibling and renamed into place, so a
//! failed write never leaves a partial file behind.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::driver::RunRecord;
use crate::error::{Error, Result};
use crate::linalg::dist;
use crate::order::{leq_within, ObjectiveVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerSeries {
    pub distances: Vec<f64>,
    pub monotone: bool,
    /// `max(0, max_k d_{k+1} - d_k)`.
    pub max_violation: f64,
    pub tol: f64,
}

/// Distances `‖x^k - x_ref‖` over `points`, checked for monotone decrease.
pub fn fejer_series<'a>(points: impl IntoIterator<Item = &'a [f64]>, x_ref: &[f64], tol: f64) -> Result<FejerSeries> {
    let mut distances = Vec::new();
    for p in points {
        if p.len() != x_ref.len() {
            return Err(Error::Dimension {
                expected: x_ref.len(),
                found: p.len(),
            });
        }
        distances.push(dist(p, x_ref));
    }
    let max_violation = distances
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    Ok(FejerSeries {
        distances,
        monotone: max_violation <= tol,
        max_violation,
        tol,
    })
}

/// [`fejer_series`] over a run history.
pub fn fejer_report(run: &RunRecord, x_ref: &[f64], tol: f64) -> Result<FejerSeries> {
    fejer_series(run.history.iter().map(|r| r.x.coords()), x_ref, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentReport {
    pub descending: bool,
    /// Index of the first record whose objective vector rises above its
    /// predecessor's by more than the tolerance.
    pub first_violation: Option<usize>,
}

/// Checks `F(x^{k+1}) ⪯ F(x^k) + feas_tol` for every consecutive pair.
pub fn descent_check(values: &[ObjectiveVector], feas_tol: f64) -> Result<DescentReport> {
    for (k, w) in values.windows(2).enumerate() {
        if !leq_within(&w[1], &w[0], feas_tol)? {
            return Ok(DescentReport {
                descending: false,
                first_violation: Some(k + 1),
            });
        }
    }
    Ok(DescentReport {
        descending: true,
        first_violation: None,
    })
}

/// [`descent_check`] over a run history.
pub fn descent_report(run: &RunRecord, feas_tol: f64) -> Result<DescentReport> {
    let values: Vec<ObjectiveVector> = run.history.iter().map(|r| r.f_x.clone()).collect();
    descent_check(&values, feas_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::InvalidParams(format!(
                "format must be csv or json, got `{other}`"
            ))),
        }
    }
}

/// 17 significant digits, enough to read back the same `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header row of [`run_csv`].
pub fn csv_header(m: usize, n: usize) -> Vec<String> {
    let mut h: Vec<String> = ["k", "step_norm", "beta", "inner_residual", "inner_iters"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((1..=m).map(|i| format!("F_{i}")));
    h.extend((1..=n).map(|i| format!("x_{i}")));
    h
}

/// Serializes rows as comma-separated UTF-8 with LF line endings.
pub fn csv_bytes(header: &[String], rows: &[Vec<String>], path_hint: &Path) -> Result<Vec<u8>> {
    let csv_err = |source| Error::Csv {
        path: path_hint.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| Error::io(path_hint, e.into_error()))
}

/// The history of `run` as CSV bytes, one row per iterate.
pub fn run_csv(run: &RunRecord) -> Result<Vec<u8>> {
    let first = run.final_iterate();
    let (m, n) = (first.f_x.len(), first.x.dim());
    let rows: Vec<Vec<String>> = run
        .history
        .iter()
        .map(|r| {
            let mut row = vec![
                r.k.to_string(),
                format_f64(r.step_norm),
                format_f64(r.beta),
                format_f64(r.inner_residual),
                r.inner_iters.to_string(),
            ];
            row.extend(r.f_x.iter().map(|v| format_f64(*v)));
            row.extend(r.x.iter().map(|v| format_f64(*v)));
            row
        })
        .collect();
    csv_bytes(&csv_header(m, n), &rows, Path::new("<memory>"))
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn export_run(run: &RunRecord, format: ExportFormat, path: &Path) -> Result<()> {
    let bytes = match format {
        ExportFormat::Csv => run_csv(run)?,
        ExportFormat::Json => {
            let mut b = serde_json::to_vec_pretty(run).map_err(|source| Error::Json {
                path: path.to_path_buf(),
                source,
            })?;
            b.push(b'\n');
            b
        }
    };
    write_atomic(path, &bytes)
}

pub fn import_run_json(path: &Path) -> Result<RunRecord> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}
