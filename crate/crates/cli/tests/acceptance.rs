//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nepv_cli::commands::{run_cell, CellOutcome};
use nepv_cli::config::InitialGuess;
use nepv_cli::{execute, Command, ExperimentConfig, ProblemConfig, StudyConfig};
use nepv_core::analysis::single_step_study;
use nepv_core::kernel::{
    fd_jacobian, heaviside_psd, kron, projector_frechet, shuffle_matrix, sym_eig, thin_qr, vectorize,
};
use nepv_core::nepv::lhs_map;
use nepv_core::problems::{GpeParams, GpeProblem, HeavisideTraceProblem, Potential, ScalarSineProblem};
use nepv_core::solvers::{solve, IterationTrace, Method, SelectionStrategy, SolverConfig, Target};
use nepv_core::{rng, Mat, NepvProblem, Vector};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(a: &Mat, b: &Mat) -> f64 {
    (a - b).norm() / b.norm()
}

fn gpe(n: usize, b: f64, omega: f64) -> GpeProblem {
    GpeProblem::build(GpeParams {
        n,
        l: 10.0,
        omega,
        b,
        potential: Potential::Harmonic,
    })
    .expect("valid grid")
}

fn study(initial: InitialGuess, seed: u64) -> StudyConfig {
    StudyConfig {
        kind: None,
        initial,
        seed,
        alphas: Vec::new(),
        methods: Vec::new(),
    }
}

fn rq_selection() -> SelectionStrategy {
    SelectionStrategy::nearest(Target::RayleighQuotient)
}

/// Traces whose orthogonality defects are audited by the invariant check.
#[derive(Default)]
struct Audit {
    traces: Vec<(String, IterationTrace)>,
}

impl Audit {
    fn keep(&mut self, label: impl Into<String>, trace: &IterationTrace) {
        self.traces.push((label.into(), trace.clone()));
    }
}

fn jacobian_identity(_: &mut Audit) -> Outcome {
    fn worst<P: NepvProblem>(problem: &P, seed: u64) -> Result<f64, String> {
        let mut r = rng::seeded(seed);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let v = rng::orthonormal_matrix(&mut r, problem.dim(), problem.block_size());
            let x = vectorize(&v);
            let jv = problem.jacobian(&x).map_err(err)? * &x;
            let av = lhs_map(problem, &x).map_err(err)?;
            let scale = problem.matrix(&v).map_err(err)?.norm() * x.norm();
            worst = worst.max((jv - av).norm() / scale);
        }
        Ok(worst)
    }
    let sine = worst(&ScalarSineProblem::new(1.0), 11)?;
    let g = worst(&gpe(6, 50.0, 0.5), 12)?;
    let h = worst(&HeavisideTraceProblem::new(10, 3, 1.0).map_err(err)?, 13)?;
    let max = sine.max(g).max(h);
    check(max <= 1e-10, format!("relative gap {max:.2e} > 1e-10"))?;
    Ok(format!("max relative gap: scalar_sine {sine:.1e}, gpe {g:.1e}, heaviside {h:.1e}"))
}

fn basis_invariance(_: &mut Audit) -> Outcome {
    let problem = HeavisideTraceProblem::new(10, 3, 1.0).map_err(err)?;
    let mut r = rng::seeded(21);
    let v = rng::orthonormal_matrix(&mut r, 10, 3);
    let a = problem.matrix(&v).map_err(err)?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = rng::nonsingular_matrix(&mut r, 3);
        worst = worst.max(rel(&problem.matrix(&(&v * p)).map_err(err)?, &a));
    }
    check(worst <= 1e-12, format!("relative change {worst:.2e} > 1e-12"))?;
    Ok(format!("max relative change {worst:.1e} over 20 bases"))
}

fn jacobian_fd(_: &mut Audit) -> Outcome {
    const H: f64 = 1e-6;
    fn full<P: NepvProblem>(problem: &P, seed: u64) -> Result<f64, String> {
        let v = vectorize(&rng::orthonormal_matrix(
            &mut rng::seeded(seed),
            problem.dim(),
            problem.block_size(),
        ));
        let fd = fd_jacobian(|x: &Vector| lhs_map(problem, x), &v, H).map_err(err)?;
        Ok(rel(&fd, &problem.jacobian(&v).map_err(err)?))
    }
    let sine = full(&ScalarSineProblem::new(1.0), 31)?;
    let g = full(&gpe(6, 50.0, 0.5), 32)?;

    let heaviside = HeavisideTraceProblem::new(8, 2, 1.0).map_err(err)?;
    let mut r = rng::seeded(33);
    let v = rng::orthonormal_matrix(&mut r, 8, 2);
    let x = vectorize(&v);
    let j = heaviside.jacobian(&x).map_err(err)?;
    let proj = &v * v.transpose();
    let mut h_worst = 0.0f64;
    for k in 0..20 {
        let g = rng::gaussian_matrix(&mut r, 8, 2);
        // Pure tangent directions, then general ones (WᵀV + VᵀW ≠ 0).
        let w = if k < 10 { &g - &proj * &g } else { g };
        let dir = vectorize(&w);
        let plus = lhs_map(&heaviside, &(&x + H * &dir)).map_err(err)?;
        let minus = lhs_map(&heaviside, &(&x - H * &dir)).map_err(err)?;
        let fd = (plus - minus) / (2.0 * H);
        let exact = &j * &dir;
        h_worst = h_worst.max((fd - &exact).norm() / exact.norm());
    }
    let max = sine.max(g).max(h_worst);
    check(max <= 1e-5, format!("relative error {max:.2e} > 1e-5"))?;
    Ok(format!("relative error: scalar_sine {sine:.1e}, gpe {g:.1e}, heaviside {h_worst:.1e}"))
}

fn one_step_linear(audit: &mut Audit) -> Outcome {
    let sine = ScalarSineProblem::new(0.0);
    let g = gpe(6, 0.0, 0.5);
    let h = HeavisideTraceProblem::new(10, 3, 0.0).map_err(err)?;
    let problems: [(&str, &dyn NepvProblem); 3] = [("scalar_sine", &sine), ("gpe", &g), ("heaviside", &h)];
    let mut worst_implicit = 0.0f64;
    let mut newton_misses = Vec::new();
    for (name, problem) in problems {
        let mut r = rng::seeded(41);
        let mut misses = 0;
        for trial in 0..10 {
            let v0 = rng::orthonormal_matrix(&mut r, problem.dim(), problem.block_size());
            for method in [Method::AVersion, Method::JVersion] {
                let cfg = SolverConfig::new(method).with_max_iter(1);
                let trace = solve(problem, &cfg, &v0, None).map_err(err)?;
                let res = trace.steps.first().map_or(f64::INFINITY, |s| s.residual);
                worst_implicit = worst_implicit.max(res);
                audit.keep(format!("one-step {name} {method} #{trial}"), &trace);
            }
            if problem.block_size() == 1 {
                let cfg = SolverConfig::new(Method::Newton).with_max_iter(1);
                let trace = solve(problem, &cfg, &v0, None).map_err(err)?;
                if trace.steps.first().is_some_and(|s| s.residual > 1e-6) {
                    misses += 1;
                }
            }
        }
        if problem.block_size() == 1 {
            newton_misses.push((name, misses));
        }
    }
    check(worst_implicit <= 1e-10, format!("implicit one-step residual {worst_implicit:.2e} > 1e-10"))?;
    for (name, misses) in &newton_misses {
        check(*misses >= 8, format!("newton on {name} reached 1e-6 in one step on {} of 10 trials", 10 - misses))?;
    }
    Ok(format!(
        "implicit one-step residual <= {worst_implicit:.1e}; newton one-step residual > 1e-6 on {}",
        newton_misses
            .iter()
            .map(|(n, m)| format!("{m}/10 ({n})"))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn sine_cell(alpha: f64, method: Method) -> Result<CellOutcome, String> {
    let solver = SolverConfig::new(method).with_tol(1e-10).with_selection(rq_selection());
    run_cell(&ProblemConfig::ScalarSine { alpha }, &solver, &study(InitialGuess::Ones, 0)).map_err(err)
}

fn scalar_sine_orders(audit: &mut Audit) -> Outcome {
    let mut lines = Vec::new();
    for alpha in [0.5, 1.0] {
        for method in Method::ALL {
            let cell = sine_cell(alpha, method)?;
            audit.keep(format!("order alpha={alpha} {method}"), &cell.trace);
            let order = cell
                .order
                .map(|o| o.order)
                .ok_or_else(|| format!("alpha={alpha} {method}: no order estimate ({})", cell.trace.status))?;
            let ok = match method {
                Method::AVersion | Method::JInverse => (0.8..=1.2).contains(&order),
                Method::JVersion | Method::Newton => order >= 1.8,
            };
            check(ok, format!("alpha={alpha} {method}: order {order:.3} out of range"))?;
            lines.push(format!("{method}@{alpha}={order:.2}"));
        }
    }
    let mut iters = Vec::new();
    for alpha in [0.5, 1.0, 2.0, 5.0] {
        let cell = sine_cell(alpha, Method::AVersion)?;
        audit.keep(format!("a_version alpha={alpha}"), &cell.trace);
        let it = cell
            .trace
            .iterations_to(1e-10)
            .ok_or_else(|| format!("a_version at alpha={alpha} did not reach 1e-10"))?;
        iters.push(it);
    }
    check(iters.windows(2).all(|w| w[0] <= w[1]), format!("a_version iterations {iters:?} decrease"))?;
    Ok(format!("orders {}; a_version iterations for alpha 0.5..5: {iters:?}", lines.join(" ")))
}

fn single_step(_: &mut Audit) -> Outcome {
    let alphas = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
    let v0 = Vector::from_element(4, 0.5);
    let report = single_step_study(|a| Ok(ScalarSineProblem::new(a)), &v0, &alphas, &SelectionStrategy::smallest_p())
        .map_err(err)?;
    for (name, s) in [("A", report.slope_a), ("J", report.slope_j)] {
        check((0.9..=1.1).contains(&s), format!("slope_{name} = {s:.3} outside [0.9, 1.1]"))?;
    }
    let predicted = report.coeff_j / report.coeff_a;
    let mut worst = 1.0f64;
    for (ea, ej) in report.err_a.iter().zip(&report.err_j) {
        let measured = ej / ea;
        let factor = (measured / predicted).max(predicted / measured);
        worst = worst.max(factor);
    }
    check(worst <= 2.0, format!("measured/predicted ratio off by a factor {worst:.2} > 2"))?;
    Ok(format!(
        "slopes A {:.3}, J {:.3}; predicted ratio {predicted:.3}, worst factor {worst:.2}",
        report.slope_a, report.slope_j
    ))
}

/// Ratios `e_{k+1}/e_k` of the asymptotic phase (errors between 1e-9 and 1e-3).
fn tail_ratios(trace: &IterationTrace) -> Vec<f64> {
    let errors: Vec<f64> = trace.errors().into_iter().map(|e| e.unwrap_or(f64::NAN)).collect();
    errors
        .windows(2)
        .filter(|w| (1e-9..=1e-3).contains(&w[0]) && w[1] > 1e-12)
        .map(|w| w[1] / w[0])
        .collect()
}

fn heaviside_block(audit: &mut Audit) -> Outcome {
    let mut lines = Vec::new();
    for alpha in [0.5, 0.75] {
        let problem = ProblemConfig::Heaviside { n: 10, p: 3, alpha };
        let mut iters = BTreeMap::new();
        for method in [Method::AVersion, Method::JVersion] {
            let solver = SolverConfig::new(method).with_tol(1e-10).with_budget(5000);
            let cell = run_cell(&problem, &solver, &study(InitialGuess::LinearGround, 0)).map_err(err)?;
            audit.keep(format!("heaviside alpha={alpha} {method}"), &cell.trace);
            let it = cell
                .trace
                .iterations_to(1e-8)
                .ok_or_else(|| format!("alpha={alpha} {method} did not reach 1e-8 ({})", cell.trace.status))?;
            iters.insert(method.as_str(), it);
            if method == Method::AVersion {
                let ratios = tail_ratios(&cell.trace);
                check(ratios.len() >= 3, format!("alpha={alpha}: only {} asymptotic ratios", ratios.len()))?;
                let mut sorted = ratios.clone();
                sorted.sort_by(f64::total_cmp);
                let median = sorted[sorted.len() / 2];
                let spread = ratios.iter().map(|r| (r / median - 1.0).abs()).fold(0.0, f64::max);
                check(median < 1.0 && spread <= 0.3, format!("alpha={alpha}: ratios {ratios:.3?} not constant"))?;
                lines.push(format!("alpha={alpha}: a_version ratio {median:.3} (spread {:.0}%)", spread * 100.0));
            }
        }
        let (a, j) = (iters["a_version"], iters["j_version"]);
        check(j < a, format!("alpha={alpha}: j_version {j} iterations, a_version {a}"))?;
        lines.push(format!("iterations to 1e-8 a_version {a}, j_version {j}"));
    }
    Ok(lines.join("; "))
}

fn gpe_config(b: f64) -> ProblemConfig {
    ProblemConfig::Gpe(GpeParams {
        n: 20,
        l: 10.0,
        omega: 0.0,
        b,
        potential: Potential::Harmonic,
    })
}

fn gpe_run(audit: &mut Audit) -> Outcome {
    let selection = SelectionStrategy::cluster(Target::Smallest, 0.5).map_err(err)?;
    let solver = SolverConfig::new(Method::JVersion)
        .with_tol(1e-8)
        .with_max_iter(50)
        .with_selection(selection);
    let mut lines = Vec::new();
    for (b, initial, seed) in [(0.0, InitialGuess::Random, 1), (50.0, InitialGuess::LinearGround, 0)] {
        let cell = run_cell(&gpe_config(b), &solver, &study(initial, seed)).map_err(err)?;
        let t = &cell.trace;
        audit.keep(format!("gpe b={b}"), t);
        check(
            t.converged() && t.final_residual() <= 1e-8,
            format!("b={b}: {} after {} steps, residual {:.2e}", t.status, t.len(), t.final_residual()),
        )?;
        lines.push(format!("b={b}: {} steps, residual {:.1e}", t.len(), t.final_residual()));
        if b == 0.0 {
            let problem = gpe(20, 0.0, 0.0);
            let eig = sym_eig(problem.a0_real()).map_err(err)?;
            let lambda_min = eig.eigenvalues[0];
            let v1 = &t.iterates[1];
            let v1 = v1 / v1.norm();
            let lambda = t.steps[0].eigenvalues[0];
            let shifted = problem.a0_real() - Mat::identity(problem.dim(), problem.dim()) * lambda_min;
            let vec_res = (shifted * &v1).norm();
            check(
                (lambda - lambda_min).abs() <= 1e-8 && vec_res <= 1e-8,
                format!("b=0 first step: |lambda - lambda_min| = {:.2e}, eigen-residual {vec_res:.2e}", (lambda - lambda_min).abs()),
            )?;
            lines.push(format!("first step lambda {lambda:.8} matches {lambda_min:.8}"));
        }
    }
    Ok(lines.join("; "))
}

fn orthogonality(audit: &Audit) -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (label, trace) in &audit.traces {
        if !trace.method.preserves_orthonormality() {
            continue;
        }
        count += 1;
        let d = trace.max_orth_defect();
        check(d <= 1e-12, format!("{label}: orthogonality defect {d:.2e}"))?;
        worst = worst.max(d);
    }
    check(count > 0, "no runs recorded")?;
    Ok(format!("{count} runs, max defect {worst:.1e}"))
}

fn kernels(_: &mut Audit) -> Outcome {
    let mut r = rng::seeded(101);
    for n in 1..=8 {
        let w = rng::gaussian_matrix(&mut r, n, n);
        check(shuffle_matrix(n) * vectorize(&w.transpose()) == vectorize(&w), format!("shuffle identity fails at n={n}"))?;
    }
    let mut kv = 0.0f64;
    for _ in 0..20 {
        let a = rng::gaussian_matrix(&mut r, 4, 3);
        let x = rng::gaussian_matrix(&mut r, 3, 5);
        let b = rng::gaussian_matrix(&mut r, 5, 2);
        let lhs = vectorize(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vectorize(&x);
        kv = kv.max((lhs - rhs).norm() / (a.norm() * x.norm() * b.norm()));
    }
    check(kv <= 1e-14, format!("Kronecker-vec gap {kv:.2e}"))?;
    let mut proj = 0.0f64;
    for _ in 0..20 {
        let w = rng::gaussian_matrix(&mut r, 9, 3);
        let (q, _) = thin_qr(&w).map_err(err)?;
        proj = proj.max((heaviside_psd(&(&w * w.transpose())).map_err(err)? - &q * q.transpose()).norm());
    }
    check(proj <= 1e-10, format!("projector gap {proj:.2e}"))?;
    let mut lg = 0.0f64;
    let h = 1e-6;
    for _ in 0..20 {
        let v = rng::orthonormal_matrix(&mut r, 8, 3);
        let w = rng::gaussian_matrix(&mut r, 8, 3);
        let path = |t: f64| -> Result<Mat, String> {
            let m = &v + &w * t;
            heaviside_psd(&(&m * m.transpose())).map_err(err)
        };
        let fd = (path(h)? - path(-h)?) / (2.0 * h);
        let e = &w * v.transpose() + &v * w.transpose();
        let exact = projector_frechet(&v, &e);
        lg = lg.max(rel(&fd, &exact));
    }
    check(lg <= 1e-5, format!("L_g vs finite differences {lg:.2e}"))?;
    Ok(format!("Kronecker-vec {kv:.1e}, projector {proj:.1e}, L_g {lg:.1e}"))
}

fn collect_csv(dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>, root: &Path) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_csv(&path, out, root)?;
        } else if path.extension().is_some_and(|e| e == "csv") {
            out.insert(path.strip_prefix(root).unwrap().to_owned(), fs::read(&path)?);
        }
    }
    Ok(())
}

fn determinism(_: &mut Audit) -> Outcome {
    let drivers = [
        (
            Command::Order,
            "[problem]\nfamily = scalar_sine\nalpha = 0.5\n[solver]\nselection = nearest_target\ntarget = rayleigh\n\
             [study]\ninitial = ones\nmethods = a_version, j_version, newton, j_inverse\n",
        ),
        (
            Command::SingleStep,
            "[problem]\nfamily = scalar_sine\n[study]\ninitial = ones\nalphas = 0.001, 0.003, 0.01, 0.03, 0.1\n",
        ),
        (
            Command::SweepAlpha,
            "[problem]\nfamily = heaviside\nn = 10\np = 3\n[solver]\nmax_iter = 60\n\
             [study]\ninitial = linear_ground\nalphas = 0.5, 0.75\nmethods = a_version, j_version\n",
        ),
        (
            Command::Run,
            "[problem]\nfamily = gpe\ngrid = 20\nhalf_width = 10\nomega = 0\nb = 0\n\
             [solver]\nmethod = j_version\ntol = 1e-8\nmax_iter = 50\nselection = cluster_lstsq\ntarget = smallest\ndelta = 0.5\n\
             [study]\ninitial = random\nseed = 1\n",
        ),
    ];
    let mut files = 0;
    for (command, text) in drivers {
        let config = ExperimentConfig::parse(text, Path::new(".")).map_err(err)?;
        let mut runs = Vec::new();
        for jobs in [1, 4] {
            let dir = tempfile::tempdir().map_err(err)?;
            execute(command, &config, dir.path(), Some(jobs)).map_err(err)?;
            let mut csv = BTreeMap::new();
            collect_csv(dir.path(), &mut csv, dir.path()).map_err(err)?;
            runs.push(csv);
        }
        check(!runs[0].is_empty(), format!("{command:?} wrote no CSV files"))?;
        check(runs[0] == runs[1], format!("{command:?} outputs differ between reruns"))?;
        files += runs[0].len();
    }
    Ok(format!("{files} CSV files byte-identical across reruns"))
}

type Criterion = (&'static str, Option<u64>, fn(&mut Audit) -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 Jacobian identity J(v)v = vec(A(V)V)", Some(10), jacobian_identity),
        ("2 heaviside basis invariance", Some(5), basis_invariance),
        ("3 Jacobian vs finite differences", Some(30), jacobian_fd),
        ("4 one-step exactness on linear problems", None, one_step_linear),
        ("5 scalar-sine convergence orders", Some(10), scalar_sine_orders),
        ("6 single-step study", Some(20), single_step),
        ("7 heaviside p=3 experiment", Some(300), heaviside_block),
        ("8 GPE runs", Some(300), gpe_run),
    ];
    let mut audit = Audit::default();
    let mut failed = 0;
    let mut report = |name: &str, limit: Option<u64>, elapsed: Duration, outcome: Outcome| {
        let outcome = outcome.and_then(|detail| match limit {
            Some(secs) if elapsed > Duration::from_secs(secs) => {
                Err(format!("took {:.1} s, limit {secs} s ({detail})", elapsed.as_secs_f64()))
            }
            _ => Ok(detail),
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}  [{:.2} s] {detail}", elapsed.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}  [{:.2} s] {detail}", elapsed.as_secs_f64());
            }
        }
    };
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run(&mut audit);
        report(name, limit, start.elapsed(), outcome);
    }
    let start = Instant::now();
    let outcome = orthogonality(&audit);
    report("9 orthogonality invariant", None, start.elapsed(), outcome);
    let start = Instant::now();
    let outcome = kernels(&mut audit);
    report("10 kernel suite", Some(10), start.elapsed(), outcome);
    let start = Instant::now();
    let outcome = determinism(&mut audit);
    report("11 determinism", None, start.elapsed(), outcome);

    if failed == 0 {
        println!("acceptance: all 11 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 11 criteria failed");
        ExitCode::FAILURE
    }
}
