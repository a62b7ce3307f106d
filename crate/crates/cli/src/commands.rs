use std::path::Path;

use nepv_core::analysis::{estimate_order, single_step_study, OrderEstimate};
use nepv_core::solvers::{reference_solution, solve, IterationTrace, Method, SolverConfig};
use nepv_core::NepvProblem;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ProblemConfig, StudyConfig, StudyKind};
use crate::output::{self, OrderReport, SingleStepSummary, Summary, SweepRow};
use crate::problem::AnyProblem;
use crate::CliError;

/// Residual below which a finished run is polished into a reference
/// solution for error traces.
const POLISH_FROM: f64 = 1e-6;
/// Largest residual accepted for a polished reference.
const REFERENCE_ACCEPT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    SweepAlpha,
    SingleStep,
    Order,
}

impl Command {
    fn kind(self) -> StudyKind {
        match self {
            Command::Run => StudyKind::Run,
            Command::SweepAlpha => StudyKind::SweepAlpha,
            Command::SingleStep => StudyKind::SingleStep,
            Command::Order => StudyKind::Order,
        }
    }
}

/// A finished solve with errors against its own polished solution.
pub struct CellOutcome {
    pub trace: IterationTrace,
    pub order: Option<OrderEstimate>,
}

pub fn run_cell(problem: &ProblemConfig, solver: &SolverConfig, study: &StudyConfig) -> Result<CellOutcome, CliError> {
    let built = AnyProblem::build(problem)?;
    let v0 = built.initial_guess(study.initial, study.seed)?;
    let mut trace = solve(&built, solver, &v0, None)?;
    if trace.final_residual() <= POLISH_FROM {
        match reference_solution(&built, &trace.solution.v, solver.method, &solver.selection, REFERENCE_ACCEPT) {
            Ok(reference) => trace.attach_reference(&reference.v),
            Err(e) => log::warn!("{} alpha={}: no reference solution: {e}", solver.method, built.alpha()),
        }
    }
    let order = estimate_order(&trace).ok();
    Ok(CellOutcome { trace, order })
}

/// Runs `command` and returns the process exit code.
pub fn execute(command: Command, config: &ExperimentConfig, out: &Path, jobs: Option<usize>) -> Result<i32, CliError> {
    if let Some(kind) = config.study.kind {
        if kind != command.kind() {
            log::warn!(
                "study.kind is `{}` but the `{}` command was requested; following the command",
                kind.as_str(),
                command.kind().as_str()
            );
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    pool.install(|| match command {
        Command::Run => cmd_run(config, out),
        Command::SweepAlpha => cmd_sweep_alpha(config, out),
        Command::SingleStep => cmd_single_step(config, out),
        Command::Order => cmd_order(config, out),
    })
}

fn write_cell(dir: &Path, outcome: &CellOutcome, p: usize) -> Result<(), CliError> {
    output::write_file(&dir.join("trace.csv"), &output::trace_csv(&outcome.trace, p))?;
    let summary = Summary::from_trace(&outcome.trace, outcome.order.as_ref());
    output::write_file(&dir.join("summary.json"), &output::json(&summary))
}

pub fn cmd_run(config: &ExperimentConfig, out: &Path) -> Result<i32, CliError> {
    let outcome = run_cell(&config.problem, &config.solver, &config.study)?;
    write_cell(out, &outcome, config.problem.block_size())?;
    log::info!(
        "{}: {} after {} steps, residual {:.3e}",
        config.solver.method,
        outcome.trace.status,
        outcome.trace.len(),
        outcome.trace.final_residual()
    );
    Ok(if outcome.trace.converged() { 0 } else { 1 })
}

pub fn cmd_sweep_alpha(config: &ExperimentConfig, out: &Path) -> Result<i32, CliError> {
    if config.study.alphas.is_empty() {
        return Err(CliError::Config("study.alphas: empty list".into()));
    }
    let cells: Vec<(f64, Method)> = config
        .study
        .alphas
        .iter()
        .flat_map(|&a| config.study.methods.iter().map(move |&m| (a, m)))
        .collect();
    let p = config.problem.block_size();
    let results: Vec<(SweepRow, bool)> = cells
        .par_iter()
        .map(|&(alpha, method)| {
            let dir = out.join(format!("alpha_{alpha}")).join(method.as_str());
            let problem = config.problem.with_alpha(alpha);
            let solver = SolverConfig {
                method,
                ..config.solver.clone()
            };
            match run_cell(&problem, &solver, &config.study) {
                Ok(outcome) => {
                    write_cell(&dir, &outcome, p)?;
                    let t = &outcome.trace;
                    Ok((
                        SweepRow {
                            alpha,
                            method: method.to_string(),
                            iters_to_tol: if t.converged() { t.iterations_to(solver.tol) } else { None },
                            final_residual: Some(t.final_residual()).filter(|r| r.is_finite()),
                            est_order: outcome.order.map(|o| o.order),
                        },
                        true,
                    ))
                }
                Err(e) => {
                    log::error!("alpha={alpha} {method}: {e}");
                    let summary = Summary {
                        method: method.to_string(),
                        problem: problem.family().to_string(),
                        alpha,
                        status: "error".into(),
                        iterations: 0,
                        final_residual: None,
                        est_order: None,
                        message: Some(e.to_string()),
                    };
                    output::write_file(&dir.join("summary.json"), &output::json(&summary))?;
                    Ok((
                        SweepRow {
                            alpha,
                            method: method.to_string(),
                            iters_to_tol: None,
                            final_residual: None,
                            est_order: None,
                        },
                        false,
                    ))
                }
            }
        })
        .collect::<Result<_, CliError>>()?;
    let all_ok = results.iter().all(|(_, ok)| *ok);
    let rows: Vec<SweepRow> = results.into_iter().map(|(r, _)| r).collect();
    output::write_file(&out.join("sweep.csv"), &output::sweep_csv(&rows))?;
    Ok(if all_ok { 0 } else { 1 })
}

pub fn cmd_single_step(config: &ExperimentConfig, out: &Path) -> Result<i32, CliError> {
    let alphas = &config.study.alphas;
    if alphas.is_empty() {
        return Err(CliError::Config("study.alphas: empty list".into()));
    }
    if alphas.iter().any(|a| *a <= 0.0) || alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config("study.alphas: must be positive and strictly ascending".into()));
    }
    if config.problem.block_size() != 1 {
        return Err(CliError::Config("problem.p: the single-step study needs p = 1".into()));
    }
    let base = AnyProblem::build(&config.problem)?;
    let v0 = base.initial_guess(config.study.initial, config.study.seed)?.column(0).into_owned();
    let family = |alpha: f64| AnyProblem::build(&config.problem.with_alpha(alpha));
    let report = single_step_study(family, &v0, alphas, &config.solver.selection)?;
    output::write_file(
        &out.join("single_step.csv"),
        &output::single_step_csv(&report.alphas, &report.err_a, &report.err_j, &report.pred_a, &report.pred_j),
    )?;
    let summary = SingleStepSummary {
        problem: config.problem.family().to_string(),
        slope_a: report.slope_a,
        slope_j: report.slope_j,
        coeff_a: report.coeff_a,
        coeff_j: report.coeff_j,
        lambda0: report.lambda0,
    };
    output::write_file(&out.join("single_step.json"), &output::json(&summary))?;
    log::info!("single-step slopes: A {:.3}, J {:.3}", report.slope_a, report.slope_j);
    Ok(0)
}

pub fn cmd_order(config: &ExperimentConfig, out: &Path) -> Result<i32, CliError> {
    let p = config.problem.block_size();
    let results: Vec<bool> = config
        .study
        .methods
        .par_iter()
        .map(|&method| {
            let dir = out.join(method.as_str());
            let solver = SolverConfig {
                method,
                ..config.solver.clone()
            };
            let report = match run_cell(&config.problem, &solver, &config.study) {
                Ok(outcome) => {
                    output::write_file(&dir.join("trace.csv"), &output::trace_csv(&outcome.trace, p))?;
                    let t = &outcome.trace;
                    let message = match (&outcome.order, estimate_order(t)) {
                        (None, Err(e)) => Some(e.to_string()),
                        _ => t.failure.clone(),
                    };
                    OrderReport {
                        method: method.to_string(),
                        problem: t.problem.to_string(),
                        alpha: t.alpha,
                        status: t.status.to_string(),
                        iterations: t.len(),
                        order: outcome.order.as_ref().map(|o| o.order),
                        r_squared: outcome.order.as_ref().map(|o| o.r_squared),
                        fit_window: outcome.order.as_ref().map(|o| [o.fit_window.0, o.fit_window.1]),
                        message,
                    }
                }
                Err(e) => OrderReport {
                    method: method.to_string(),
                    problem: config.problem.family().to_string(),
                    alpha: config.problem.alpha(),
                    status: "error".into(),
                    iterations: 0,
                    order: None,
                    r_squared: None,
                    fit_window: None,
                    message: Some(e.to_string()),
                },
            };
            let ok = report.order.is_some();
            output::write_file(&dir.join("order.json"), &output::json(&report))?;
            Ok(ok)
        })
        .collect::<Result<_, CliError>>()?;
    Ok(if results.iter().all(|ok| *ok) { 0 } else { 1 })
}
