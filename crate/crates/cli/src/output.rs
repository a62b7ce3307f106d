//! File formats. Floats in CSV files are written with 17 significant digits
//! so that outputs are byte-reproducible and round-trip exactly.

use std::fmt::Write as _;
use std::path::Path;

use nepv_core::analysis::OrderEstimate;
use nepv_core::solvers::IterationTrace;
use serde::Serialize;

use crate::CliError;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `iter,error,residual,orth_defect,eig_1..eig_p`.
pub fn trace_csv(trace: &IterationTrace, p: usize) -> String {
    let mut s = String::from("iter,error,residual,orth_defect");
    for i in 1..=p {
        let _ = write!(s, ",eig_{i}");
    }
    s.push('\n');
    for r in trace.records() {
        let _ = write!(
            s,
            "{},{},{},{}",
            r.iter,
            opt_float(r.error),
            float(r.residual),
            float(r.orth_defect)
        );
        for i in 0..p {
            let _ = write!(s, ",{}", opt_float(r.eigenvalues.get(i).copied()));
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Summary {
    pub method: String,
    pub problem: String,
    pub alpha: f64,
    pub status: String,
    pub iterations: usize,
    pub final_residual: Option<f64>,
    pub est_order: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Summary {
    pub fn from_trace(trace: &IterationTrace, order: Option<&OrderEstimate>) -> Self {
        Self {
            method: trace.method.to_string(),
            problem: trace.problem.to_string(),
            alpha: trace.alpha,
            status: trace.status.to_string(),
            iterations: trace.len(),
            final_residual: Some(trace.final_residual()).filter(|r| r.is_finite()),
            est_order: order.map(|o| o.order),
            message: trace.failure.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OrderReport {
    pub method: String,
    pub problem: String,
    pub alpha: f64,
    pub status: String,
    pub iterations: usize,
    pub order: Option<f64>,
    pub r_squared: Option<f64>,
    pub fit_window: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SingleStepSummary {
    pub problem: String,
    pub slope_a: f64,
    pub slope_j: f64,
    pub coeff_a: f64,
    pub coeff_j: f64,
    pub lambda0: f64,
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary types serialize");
    s.push('\n');
    s
}

pub struct SweepRow {
    pub alpha: f64,
    pub method: String,
    pub iters_to_tol: Option<usize>,
    pub final_residual: Option<f64>,
    pub est_order: Option<f64>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("alpha,method,iters_to_tol,final_residual,est_order\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            float(r.alpha),
            r.method,
            r.iters_to_tol.map(|i| i.to_string()).unwrap_or_default(),
            opt_float(r.final_residual),
            opt_float(r.est_order)
        );
    }
    s
}

pub fn single_step_csv(alphas: &[f64], err_a: &[f64], err_j: &[f64], pred_a: &[f64], pred_j: &[f64]) -> String {
    let mut s = String::from("alpha,err_A,err_J,pred_A,pred_J\n");
    for i in 0..alphas.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            float(alphas[i]),
            float(err_a[i]),
            float(err_j[i]),
            float(pred_a[i]),
            float(pred_j[i])
        );
    }
    s
}
