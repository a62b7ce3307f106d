use std::fmt;
use std::time::Instant;

use super::config::{Method, SelectionStrategy, SolverConfig};
use super::steps::{step, StepOutput};
use crate::kernel::{orth_defect, sym_eig, thin_qr};
use crate::nepv::{residual, subspace_error};
use crate::{Mat, NepvError, NepvProblem, Result, SubspaceIterate};

/// Residual must drop by this relative amount within `STAGNATION_WINDOW`
/// steps.
const STAGNATION_FACTOR: f64 = 1e-2;
const STAGNATION_WINDOW: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIter,
    Stagnated,
    SelectionFailed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIter => "max_iter",
            Status::Stagnated => "stagnated",
            Status::SelectionFailed => "selection_failed",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// 0 for the initial guess.
    pub iter: usize,
    pub error: Option<f64>,
    pub residual: f64,
    pub orth_defect: f64,
    pub eigenvalues: Vec<f64>,
    /// Seconds spent in this step.
    pub wall_time: f64,
    pub inner_residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub method: Method,
    pub problem: &'static str,
    pub alpha: f64,
    pub tol: f64,
    /// Record of the initial guess.
    pub initial: StepRecord,
    pub steps: Vec<StepRecord>,
    pub status: Status,
    /// Final iterate with `S` diagonalized.
    pub solution: SubspaceIterate,
    /// `V` of the initial guess and of every step.
    pub iterates: Vec<Mat>,
    /// Message of the failure behind `SelectionFailed`.
    pub failure: Option<String>,
}

impl IterationTrace {
    /// Number of steps taken.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    /// The initial record followed by the step records.
    pub fn records(&self) -> impl Iterator<Item = &StepRecord> {
        std::iter::once(&self.initial).chain(self.steps.iter())
    }

    pub fn final_record(&self) -> &StepRecord {
        self.steps.last().unwrap_or(&self.initial)
    }

    pub fn final_residual(&self) -> f64 {
        self.final_record().residual
    }

    /// First step index whose residual is at most `tol`.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.records().find(|r| r.residual <= tol).map(|r| r.iter)
    }

    /// Errors of all records (initial first), where known.
    pub fn errors(&self) -> Vec<Option<f64>> {
        self.records().map(|r| r.error).collect()
    }

    pub fn max_orth_defect(&self) -> f64 {
        self.records().map(|r| r.orth_defect).fold(0.0, f64::max)
    }

    /// Recomputes every record's error against `reference`.
    pub fn attach_reference(&mut self, reference: &Mat) {
        let errors: Vec<f64> = self.iterates.iter().map(|v| subspace_error(v, reference)).collect();
        self.initial.error = Some(errors[0]);
        for (rec, e) in self.steps.iter_mut().zip(&errors[1..]) {
            rec.error = Some(*e);
        }
    }
}

/// Orthonormalizes `v0` (thin QR) when it is not orthonormal already.
pub fn prepare_initial(v0: &Mat) -> Result<Mat> {
    if orth_defect(v0) <= 1e-14 {
        Ok(v0.clone())
    } else {
        Ok(thin_qr(v0)?.0)
    }
}

/// Runs `config.method` from `v0` until the residual drops to `config.tol`.
/// `S₀` is the Rayleigh block `V₀ᵀ A(V₀) V₀`.
pub fn solve<P: NepvProblem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
    v0: &Mat,
    reference: Option<&Mat>,
) -> Result<IterationTrace> {
    config.validate()?;
    if v0.shape() != (problem.dim(), problem.block_size()) {
        return Err(NepvError::DimensionMismatch(format!(
            "initial guess must be {}x{}, got {}x{}",
            problem.dim(),
            problem.block_size(),
            v0.nrows(),
            v0.ncols()
        )));
    }
    let start = SubspaceIterate::with_rayleigh_block(problem, prepare_initial(v0)?)?;
    solve_from(problem, config, start, reference)
}

/// Like [`solve`], from a given `(V₀, S₀)`.
pub fn solve_from<P: NepvProblem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
    start: SubspaceIterate,
    reference: Option<&Mat>,
) -> Result<IterationTrace> {
    config.validate()?;
    let record = |iter: usize, it: &SubspaceIterate, out: Option<&StepOutput>, secs: f64| -> Result<StepRecord> {
        Ok(StepRecord {
            iter,
            error: reference.map(|r| subspace_error(&it.v, r)),
            residual: residual(problem, it)?.norm,
            orth_defect: it.orth_defect(),
            eigenvalues: out.map_or_else(|| it.eigenvalues(), |o| o.eigenvalues.clone()),
            wall_time: secs,
            inner_residual: out.and_then(|o| o.inner_residual),
        })
    };

    let initial = record(0, &start, None, 0.0)?;
    let mut iterates = vec![start.v.clone()];
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut current = start;
    let mut failure = None;
    let mut status = if initial.residual <= config.tol {
        Status::Converged
    } else {
        Status::MaxIter
    };

    if status != Status::Converged {
        for k in 1..=config.max_iter {
            let t0 = Instant::now();
            let out = match step(problem, config, &current) {
                Ok(out) => out,
                Err(NepvError::SelectionFailed(msg)) => {
                    log::info!("{} step {k}: selection failed: {msg}", config.method);
                    status = Status::SelectionFailed;
                    failure = Some(msg);
                    break;
                }
                Err(e) => return Err(e),
            };
            let rec = record(k, &out.iterate, Some(&out), t0.elapsed().as_secs_f64())?;
            log::debug!("{} step {k}: residual {:.3e}", config.method, rec.residual);
            let res = rec.residual;
            if !res.is_finite() {
                return Err(NepvError::NonFinite);
            }
            iterates.push(out.iterate.v.clone());
            steps.push(rec);
            current = out.iterate;
            if res <= config.tol {
                status = Status::Converged;
                break;
            }
            if steps.len() >= STAGNATION_WINDOW {
                let earlier = if steps.len() == STAGNATION_WINDOW {
                    initial.residual
                } else {
                    steps[steps.len() - 1 - STAGNATION_WINDOW].residual
                };
                if res > (1.0 - STAGNATION_FACTOR) * earlier {
                    status = Status::Stagnated;
                    break;
                }
            }
        }
    }

    Ok(IterationTrace {
        method: config.method,
        problem: problem.name(),
        alpha: problem.alpha(),
        tol: config.tol,
        initial,
        steps,
        status,
        solution: diagonalize(current)?,
        iterates,
        failure,
    })
}

/// `(V Q, Λ)` from `S = Q Λ Qᵀ`.
pub fn diagonalize(it: SubspaceIterate) -> Result<SubspaceIterate> {
    if it.block_size() == 1 {
        return Ok(it);
    }
    let eig = sym_eig(&it.s)?;
    Ok(SubspaceIterate {
        v: &it.v * &eig.eigenvectors,
        s: Mat::from_diagonal(&eig.eigenvalues),
    })
}

/// Tolerance of reference solutions.
pub const REFERENCE_TOL: f64 = 1e-13;

/// High-accuracy solution near `start`: Newton (`p = 1`) or SCF (`p > 1`)
/// polishing to [`REFERENCE_TOL`], falling back to `fallback` with the same
/// tolerance. Accepts the best result whose residual is at most
/// `accept`.
pub fn reference_solution<P: NepvProblem + ?Sized>(
    problem: &P,
    start: &Mat,
    fallback: Method,
    selection: &SelectionStrategy,
    accept: f64,
) -> Result<SubspaceIterate> {
    reference_solution_within(problem, start, fallback, selection, accept, 1e-2)
}

/// Like [`reference_solution`], accepting results up to `max_move` (subspace
/// distance) away from `start`.
pub fn reference_solution_within<P: NepvProblem + ?Sized>(
    problem: &P,
    start: &Mat,
    fallback: Method,
    selection: &SelectionStrategy,
    accept: f64,
    max_move: f64,
) -> Result<SubspaceIterate> {
    let primary = if problem.block_size() == 1 {
        Method::Newton
    } else {
        Method::AVersion
    };
    let mut best: Option<(f64, SubspaceIterate)> = None;
    let mut methods = vec![primary];
    if fallback != primary {
        methods.push(fallback);
    }
    for method in methods {
        let cfg = SolverConfig::new(method)
            .with_tol(REFERENCE_TOL)
            .with_max_iter(if method == Method::AVersion { 2000 } else { 100 })
            .with_selection(*selection);
        let attempt = solve(problem, &cfg, start, None);
        match attempt {
            Ok(trace) => {
                let sol = SubspaceIterate {
                    v: prepare_initial(&trace.solution.v)?,
                    s: trace.solution.s.clone(),
                };
                let res = residual(problem, &sol)?.norm;
                let moved = subspace_error(&sol.v, &prepare_initial(start)?);
                log::debug!("reference via {method}: residual {res:.3e}, moved {moved:.3e}");
                if moved < max_move && best.as_ref().is_none_or(|(r, _)| res < *r) {
                    best = Some((res, sol));
                }
                if res <= REFERENCE_TOL {
                    break;
                }
            }
            Err(e) => log::debug!("reference via {method} failed: {e}"),
        }
    }
    match best {
        Some((res, sol)) if res <= accept => Ok(sol),
        Some((res, _)) => Err(NepvError::NotASolution(res)),
        None => Err(NepvError::ReferenceFailed {
            alpha: problem.alpha(),
            reason: "no polishing run stayed near the starting point".into(),
        }),
    }
}
