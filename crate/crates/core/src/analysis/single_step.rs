use rayon::prelude::*;

use super::order::loglog_fit;
use crate::kernel::{fd_jacobian, sym_eig};
use crate::nepv::subspace_error;
use crate::solvers::{reference_solution_within, step, Method, SelectionStrategy, SolverConfig, FD_STEP};
use crate::{Mat, NepvError, Result, SplitProblem, SubspaceIterate, Vector};

/// Residual accepted for the per-α reference solutions.
const REFERENCE_ACCEPT: f64 = 1e-11;
/// Largest α increment between continuation solves.
const CONTINUATION_STEP: f64 = 1e-2;
/// Largest subspace distance accepted between consecutive continuation solves.
const CONTINUATION_MOVE: f64 = 0.1;

/// Linearizations of `C` entering the single-step error:
/// `P_* = C(v_*)`, `P_A = C(v₀)`, `P_J = d/dv (C(v) v)` at `v₀`, with
/// `coefficient_β = ‖C(v_*) v_* − P_β v_*‖` and `v_*` the solution at α = 0.
#[derive(Debug, Clone)]
pub struct SingleStepModel {
    pub p_star: Mat,
    pub p_a: Mat,
    pub p_j: Mat,
    pub coefficient_a: f64,
    pub coefficient_j: f64,
}

#[derive(Debug, Clone)]
pub struct SingleStepReport {
    pub alphas: Vec<f64>,
    pub err_a: Vec<f64>,
    pub err_j: Vec<f64>,
    /// First-order predictions `α ‖G (C(v_*) v_* − P_β v_*)‖` with `G` the
    /// reduced resolvent of `A₀` at `λ₀`.
    pub pred_a: Vec<f64>,
    pub pred_j: Vec<f64>,
    pub slope_a: f64,
    pub slope_j: f64,
    pub coeff_a: f64,
    pub coeff_j: f64,
    pub model: SingleStepModel,
    pub lambda0: f64,
    pub v_star0: Vector,
    /// High-accuracy solution for each α.
    pub references: Vec<Mat>,
}

/// One A-version step and one J-version step from `v0` for every α, compared
/// against accurate solutions obtained by Newton continuation in α.
pub fn single_step_study<P, F>(
    family: F,
    v0: &Vector,
    alphas: &[f64],
    selection: &SelectionStrategy,
) -> Result<SingleStepReport>
where
    P: SplitProblem,
    F: Fn(f64) -> Result<P> + Sync,
{
    if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0)) || alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NepvError::InvalidArgument("alphas must be positive and strictly ascending".into()));
    }
    if (v0.norm() - 1.0).abs() > 1e-10 {
        return Err(NepvError::InvalidArgument(format!("v0 must be normalized, has norm {}", v0.norm())));
    }
    let n = v0.len();
    let v0m = Mat::from_column_slice(n, 1, v0.as_slice());

    let linear = family(0.0)?;
    if linear.block_size() != 1 || linear.dim() != n {
        return Err(NepvError::DimensionMismatch("single-step study needs p = 1 and dim(v0) = n".into()));
    }
    let a_cfg = SolverConfig::new(Method::AVersion).with_selection(*selection);
    let start0 = SubspaceIterate::with_rayleigh_block(&linear, v0m.clone())?;
    let exact0 = step(&linear, &a_cfg, &start0)?.iterate;
    let v_star0 = exact0.v.column(0).into_owned();
    let lambda0 = exact0.s[(0, 0)];

    let reference_problem = family(alphas[0])?;
    let c_of = |v: &Vector| -> Result<Vector> {
        let vm = Mat::from_column_slice(n, 1, v.as_slice());
        Ok(reference_problem.nonlinear_part(&vm)? * v)
    };
    // C does not depend on α; any member of the family will do.
    let p_star = reference_problem.nonlinear_part(&exact0.v)?;
    let p_a = reference_problem.nonlinear_part(&v0m)?;
    let p_j = fd_jacobian(c_of, v0, FD_STEP)?;
    let target = &p_star * &v_star0;
    let r_a = &target - &p_a * &v_star0;
    let r_j = &target - &p_j * &v_star0;
    let model = SingleStepModel {
        coefficient_a: r_a.norm(),
        coefficient_j: r_j.norm(),
        p_star,
        p_a,
        p_j,
    };

    let resolvent = reduced_resolvent(linear.linear_part(), lambda0)?;
    let g_a = (&resolvent * &r_a).norm();
    let g_j = (&resolvent * &r_j).norm();

    let mut references = Vec::with_capacity(alphas.len());
    let mut previous = exact0.v.clone();
    let mut reached = 0.0;
    for &alpha in alphas {
        let substeps = ((alpha - reached) / CONTINUATION_STEP).ceil().max(1.0) as usize;
        for k in 1..=substeps {
            let a = reached + (alpha - reached) * k as f64 / substeps as f64;
            let problem = family(a)?;
            let sol = reference_solution_within(
                &problem,
                &previous,
                Method::AVersion,
                selection,
                REFERENCE_ACCEPT,
                CONTINUATION_MOVE,
            )
            .map_err(|e| match e {
                NepvError::ReferenceFailed { .. } => e,
                other => NepvError::ReferenceFailed {
                    alpha: a,
                    reason: other.to_string(),
                },
            })?;
            previous = sol.v;
        }
        reached = alpha;
        references.push(previous.clone());
    }

    let j_cfg = SolverConfig::new(Method::JVersion).with_selection(*selection);
    let errors: Vec<(f64, f64)> = alphas
        .par_iter()
        .zip(references.par_iter())
        .map(|(&alpha, reference)| -> Result<(f64, f64)> {
            let problem = family(alpha)?;
            let start = SubspaceIterate::with_rayleigh_block(&problem, v0m.clone())?;
            let va = step(&problem, &a_cfg, &start)?.iterate.v;
            let vj = step(&problem, &j_cfg, &start)?.iterate.v;
            Ok((subspace_error(&va, reference), subspace_error(&vj, reference)))
        })
        .collect::<Result<_>>()?;
    let (err_a, err_j): (Vec<f64>, Vec<f64>) = errors.into_iter().unzip();

    let log_alpha: Vec<f64> = alphas.iter().map(|a| a.ln()).collect();
    let slope = |errs: &[f64]| -> f64 {
        let logs: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        loglog_fit(&log_alpha, &logs).0
    };

    Ok(SingleStepReport {
        alphas: alphas.to_vec(),
        slope_a: slope(&err_a),
        slope_j: slope(&err_j),
        pred_a: alphas.iter().map(|a| a * g_a).collect(),
        pred_j: alphas.iter().map(|a| a * g_j).collect(),
        err_a,
        err_j,
        coeff_a: model.coefficient_a,
        coeff_j: model.coefficient_j,
        model,
        lambda0,
        v_star0,
        references,
    })
}

/// `Σ_{λᵢ ≠ λ₀} qᵢ qᵢᵀ / (λᵢ − λ₀)` for symmetric `A₀`.
fn reduced_resolvent(a0: &Mat, lambda0: f64) -> Result<Mat> {
    let eig = sym_eig(a0)?;
    let n = eig.dim();
    let scale = eig.eigenvalues.amax().max(1.0);
    let mut g = Mat::zeros(n, n);
    for i in 0..n {
        let gap = eig.eigenvalues[i] - lambda0;
        if gap.abs() > 1e-10 * scale {
            let q = eig.eigenvectors.column(i);
            g += q * q.transpose() / gap;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{LinearProblem, ScalarSineProblem};
    use crate::solvers::{solve, Target};

    fn sine(alpha: f64) -> Result<ScalarSineProblem> {
        Ok(ScalarSineProblem::new(alpha))
    }

    #[test]
    fn errors_scale_linearly() {
        let v0 = Vector::from_element(4, 0.5);
        let sel = SelectionStrategy::nearest(Target::RayleighQuotient);
        let alphas = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
        let rep = single_step_study(sine, &v0, &alphas, &sel).unwrap();
        assert!((rep.slope_a - 1.0).abs() < 0.1, "{}", rep.slope_a);
        assert!((rep.slope_j - 1.0).abs() < 0.1, "{}", rep.slope_j);
        let measured = rep.err_j[0] / rep.err_a[0];
        let predicted = rep.coeff_j / rep.coeff_a;
        assert!(measured / predicted < 2.0 && predicted / measured < 2.0);
        assert!((rep.pred_a[0] / rep.err_a[0] - 1.0).abs() < 0.05);
    }

    #[test]
    fn matches_first_solver_step() {
        let v0 = Vector::from_element(4, 0.5);
        let sel = SelectionStrategy::nearest(Target::RayleighQuotient);
        let rep = single_step_study(sine, &v0, &[0.01, 0.02], &sel).unwrap();
        let problem = ScalarSineProblem::new(0.02);
        let v0m = Mat::from_column_slice(4, 1, v0.as_slice());
        for (method, errs) in [(Method::AVersion, &rep.err_a), (Method::JVersion, &rep.err_j)] {
            let cfg = SolverConfig::new(method).with_selection(sel).with_max_iter(1);
            let trace = solve(&problem, &cfg, &v0m, Some(&rep.references[1])).unwrap();
            assert_eq!(trace.steps[0].error, Some(errs[1]));
        }
    }

    #[test]
    fn linear_nonlinearity_from_solution_has_zero_j_coefficient() {
        let a0 = Mat::from_diagonal(&Vector::from_vec(vec![1.0, 3.0, 6.0]));
        let c = Mat::from_row_slice(3, 3, &[0.0, 1.0, 0.5, 1.0, 2.0, 0.0, 0.5, 0.0, -1.0]);
        let family = |alpha: f64| Ok(LinearProblem::with_perturbation(a0.clone(), c.clone(), alpha, 1));
        let v0 = Vector::from_vec(vec![1.0, 0.0, 0.0]);
        let rep = single_step_study(family, &v0, &[0.01, 0.02], &SelectionStrategy::smallest_p()).unwrap();
        assert!(rep.coeff_j < 1e-8, "{}", rep.coeff_j);
        assert!(rep.err_j.iter().all(|e| *e < 1e-12));
    }

    #[test]
    fn rejects_bad_grid() {
        let v0 = Vector::from_element(4, 0.5);
        let sel = SelectionStrategy::smallest_p();
        assert!(single_step_study(sine, &v0, &[0.1, 0.01], &sel).is_err());
        assert!(single_step_study(sine, &v0, &[], &sel).is_err());
        assert!(single_step_study(sine, &(v0 * 2.0), &[0.1], &sel).is_err());
    }
}
