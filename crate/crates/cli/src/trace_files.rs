//! Trace file schema and emission.
//!
//! JSON: `{"meta": {...}, "columns": [...], "rows": [[...]]}`; the CSV
//! mirror has the same column order and the same shortest round-trip number
//! formatting, with empty cells where JSON has null.

use grsd_core::solvers::{ConvergenceTrace, StopReason};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

pub const COLUMNS: [&str; 12] = [
    "t",
    "f",
    "gap",
    "dist",
    "theta_max",
    "grad_norm_f",
    "grad_norm_2",
    "eta",
    "a",
    "linear_bound",
    "sublinear_bound",
    "lyapunov",
];

#[derive(Clone, Debug, Serialize)]
pub struct TraceMeta {
    pub algorithm: String,
    pub n: usize,
    pub k: usize,
    pub spectrum: Vec<f64>,
    pub rotate: bool,
    pub seed: u64,
    pub rule: String,
    pub init_angle: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub noise_sigma: f64,
    pub gamma: f64,
    pub delta: f64,
    pub f_star: f64,
    pub d0: f64,
    pub stop: String,
    pub iterations: usize,
}

#[derive(Serialize)]
struct TraceFile<'a> {
    meta: &'a TraceMeta,
    columns: [&'static str; 12],
    rows: Vec<Vec<Option<f64>>>,
}

pub fn stop_label(stop: StopReason) -> &'static str {
    match stop {
        StopReason::DistTol => "dist_tol",
        StopReason::FvalTol => "fval_tol",
        StopReason::GradientZero => "gradient_zero",
        StopReason::MaxIters => "max_iters",
        StopReason::FixedPoint => "fixed_point",
    }
}

pub fn rows_of(trace: &ConvergenceTrace) -> Vec<Vec<Option<f64>>> {
    (0..trace.len())
        .map(|t| {
            vec![
                Some(t as f64),
                Some(trace.f[t]),
                Some(trace.gap[t]),
                Some(trace.dist[t]),
                Some(trace.theta_max[t]),
                Some(trace.grad_norm_f[t]),
                Some(trace.grad_norm_2[t]),
                trace.eta[t],
                trace.a[t],
                trace.linear_bound.as_ref().map(|b| b[t]),
                trace.sublinear_bound.as_ref().map(|b| b[t]),
                trace.lyapunov.as_ref().map(|b| b[t]),
            ]
        })
        .collect()
}

/// Emission formats for trace files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

/// Writes the requested formats and returns the created paths.
pub fn write_trace(
    dir: &Path,
    stem: &str,
    meta: &TraceMeta,
    trace: &ConvergenceTrace,
    format: Format,
) -> std::io::Result<Vec<PathBuf>> {
    let rows = rows_of(trace);
    let mut paths = Vec::new();
    if matches!(format, Format::Json | Format::Both) {
        let path = dir.join(format!("{stem}.json"));
        let file = TraceFile {
            meta,
            columns: COLUMNS,
            rows: rows.clone(),
        };
        fs::write(&path, serde_json::to_vec_pretty(&file)?)?;
        paths.push(path);
    }
    if matches!(format, Format::Csv | Format::Both) {
        let path = dir.join(format!("{stem}.csv"));
        let mut out = String::new();
        out.push_str(&COLUMNS.join(","));
        out.push('\n');
        let mut buffer = ryu::Buffer::new();
        for row in &rows {
            let cells: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Some(x) => buffer.format(*x).to_string(),
                    None => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        fs::write(&path, out)?;
        paths.push(path);
    }
    if let Some(iterates) = &trace.iterates {
        let path = dir.join(format!("{stem}_iterates.json"));
        #[derive(Serialize)]
        struct Iterates {
            n: usize,
            k: usize,
            column_major: Vec<Vec<f64>>,
        }
        let reps = Iterates {
            n: meta.n,
            k: meta.k,
            column_major: iterates
                .iter()
                .map(|m| m.as_slice().to_vec())
                .collect(),
        };
        fs::write(&path, serde_json::to_vec(&reps)?)?;
        paths.push(path);
    }
    Ok(paths)
}
