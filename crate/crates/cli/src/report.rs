//! Experiment reports: per-run metadata, final metrics, bound-compliance
//! booleans and emitted trace paths.

use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Serialize)]
pub struct BoundChecks {
    pub contraction: bool,
    pub cap: bool,
    pub lyapunov: bool,
    pub bounds: bool,
    pub pass: bool,
}

impl From<&grsd_core::solvers::ContractionReport> for BoundChecks {
    fn from(r: &grsd_core::solvers::ContractionReport) -> Self {
        BoundChecks {
            contraction: r.contraction.iter().all(|&b| b),
            cap: r.cap.iter().all(|&b| b),
            lyapunov: r.lyapunov.iter().all(|&b| b),
            bounds: r.bounds.iter().all(|&b| b),
            pass: r.pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub algorithm: String,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub rule: String,
    pub iterations: usize,
    pub final_f: f64,
    pub final_gap: f64,
    pub final_dist: f64,
    pub final_theta_max: f64,
    pub stop: String,
    pub bound_checks: Option<BoundChecks>,
    pub trace_paths: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub runs: Vec<RunReport>,
    pub all_bounds_pass: bool,
}

impl ExperimentReport {
    pub fn new(runs: Vec<RunReport>) -> Self {
        let all_bounds_pass = runs
            .iter()
            .filter_map(|r| r.bound_checks.as_ref())
            .all(|b| b.pass);
        ExperimentReport {
            runs,
            all_bounds_pass,
        }
    }
}

pub fn write_report(dir: &Path, report: &ExperimentReport) -> std::io::Result<PathBuf> {
    let path = dir.join("report.json");
    fs::write(&path, serde_json::to_vec_pretty(report)?)?;
    Ok(path)
}
