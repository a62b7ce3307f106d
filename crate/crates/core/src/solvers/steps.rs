//! Single outer steps of each iteration. Every step maps an iterate
//! `(V_k, S_k)` to `(V_{k+1}, S_{k+1})`.

use super::config::{Method, SelectionStrategy, SolverConfig};
use super::select::{select_eigenpairs, Selection, Spectrum};
use super::simplex::{self, SimplexOptions};
use crate::kernel::{
    fd_jacobian, lstsq, lu_solve, orthogonal_complement, real_eigen, sym_eig, symmetrize, thin_qr,
    unvectorize, vectorize,
};
use crate::nepv::{eval_a, eval_j, fixed_point_jacobian, lhs_map, residual};
use crate::{Mat, NepvError, NepvProblem, Result, SubspaceIterate, Vector};

/// Step size of the finite-difference fallback for problems without an
/// analytic Jacobian.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub iterate: SubspaceIterate,
    /// Eigenvalues of `S_{k+1}` (ascending for `p > 1`).
    pub eigenvalues: Vec<f64>,
    /// Final objective `‖J(v_k) vec(V) − vec(V S)‖²` of the inexact inner
    /// solve, when one was run.
    pub inner_residual: Option<f64>,
}

impl StepOutput {
    fn new(iterate: SubspaceIterate) -> Self {
        let eigenvalues = iterate.eigenvalues();
        Self {
            iterate,
            eigenvalues,
            inner_residual: None,
        }
    }
}

/// Dispatches one step of `config.method`.
pub fn step<P: NepvProblem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
    current: &SubspaceIterate,
) -> Result<StepOutput> {
    match config.method {
        Method::AVersion => step_a_version(problem, current, &config.selection),
        Method::JVersion if current.block_size() == 1 => step_j_version_p1(problem, current, &config.selection),
        Method::JVersion => step_j_version_subspace(problem, current, &config.selection, config.inexact_budget),
        Method::Newton => step_newton(problem, current),
        Method::JInverse => step_j_inverse(problem, current),
    }
}

/// Analytic `J(v)`, or central differences of `v ↦ vec(A(V) V)`.
pub fn jacobian_or_fd<P: NepvProblem + ?Sized>(problem: &P, v: &Vector) -> Result<Mat> {
    if problem.has_analytic_jacobian() {
        eval_j(problem, v)
    } else {
        fd_jacobian(|x| lhs_map(problem, x), v, FD_STEP)
    }
}

/// `Y = QR`, `S = R Z R⁻¹` symmetrized, so that `M Q = Q S` whenever
/// `M Y = Y Z`.
fn orthonormalize(selection: Selection) -> Result<StepOutput> {
    let (q, r) = thin_qr(&selection.y)?;
    let p = q.ncols();
    let z = Mat::from_diagonal(&Vector::from_vec(selection.eigenvalues.clone()));
    let r_inv = r
        .clone()
        .solve_upper_triangular(&Mat::identity(p, p))
        .ok_or(NepvError::Singular(0.0))?;
    let s = symmetrize(&(&r * z * r_inv));
    Ok(StepOutput {
        iterate: SubspaceIterate { v: q, s },
        eigenvalues: selection.eigenvalues,
        inner_residual: None,
    })
}

/// SCF step: `p` eigenpairs of `A(V_k)`.
pub fn step_a_version<P: NepvProblem + ?Sized>(
    problem: &P,
    current: &SubspaceIterate,
    selection: &SelectionStrategy,
) -> Result<StepOutput> {
    let a = eval_a(problem, &current.v)?;
    let eig = sym_eig(&a)?;
    let picked = select_eigenpairs(Spectrum::Symmetric(&eig), selection, &current.v, &a)?;
    orthonormalize(picked)
}

/// `J(v_k) v_{k+1} = λ v_{k+1}` with the eigenpair chosen among the real
/// eigenpairs of the nonsymmetric `J(v_k)`.
pub fn step_j_version_p1<P: NepvProblem + ?Sized>(
    problem: &P,
    current: &SubspaceIterate,
    selection: &SelectionStrategy,
) -> Result<StepOutput> {
    if current.block_size() != 1 {
        return Err(NepvError::InvalidArgument("step_j_version_p1 needs p = 1".into()));
    }
    let v = current.vec_v();
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(NepvError::NotOrthonormal((norm * norm - 1.0).abs()));
    }
    let jac = jacobian_or_fd(problem, &v)?;
    let eig = real_eigen(&jac)?;
    let picked = select_eigenpairs(Spectrum::General(&eig), selection, &current.v, &jac)?;
    orthonormalize(picked)
}

/// Returns `J₁₁` when `J = I_p ⊗ J₁₁` up to rounding.
fn kronecker_diagonal_block(jac: &Mat, n: usize, p: usize) -> Option<Mat> {
    let tol = 1e-14 * jac.norm().max(f64::MIN_POSITIVE);
    let first = jac.view((0, 0), (n, n)).into_owned();
    for a in 0..p {
        for b in 0..p {
            let block = jac.view((a * n, b * n), (n, n));
            let dev = if a == b { (block - &first).norm() } else { block.norm() };
            if dev > tol {
                return None;
            }
        }
    }
    Some(first)
}

/// `r(V, S) = ‖J vec(V) − vec(V S)‖²` with `S = sym(Vᵀ Y)`, `Y = unvec(J vec V)`,
/// the minimizing symmetric `S` for fixed orthonormal `V`.
fn coupled_residual(jac: &Mat, v: &Mat) -> (f64, Mat) {
    let (n, p) = v.shape();
    let y = jac * vectorize(v);
    let y = Mat::from_column_slice(n, p, y.as_slice());
    let s = symmetrize(&(v.transpose() * &y));
    ((y - v * &s).norm_squared(), s)
}

/// Inexact solve of `J(v_k) vec(V) = (Sᵀ ⊗ I_n) vec(V)`, `VᵀV = I`.
///
/// `V = qf(V_k + V_⊥ X)` is parametrized by `X ∈ ℝ^{(n−p)×p}` with `V_⊥`
/// an orthonormal complement of `V_k`; `S` is eliminated in closed form.
/// The objective `r` is minimized by Nelder–Mead from `X = 0` within
/// `budget` evaluations. When `J` is block diagonal the equation is a
/// linear eigenproblem and is solved exactly instead.
pub fn step_j_version_subspace<P: NepvProblem + ?Sized>(
    problem: &P,
    current: &SubspaceIterate,
    selection: &SelectionStrategy,
    budget: usize,
) -> Result<StepOutput> {
    let (n, p) = current.v.shape();
    let defect = current.orth_defect();
    if defect > 1e-8 {
        return Err(NepvError::NotOrthonormal(defect));
    }
    let jac = jacobian_or_fd(problem, &current.vec_v())?;

    if let Some(j11) = kronecker_diagonal_block(&jac, n, p) {
        let eig = real_eigen(&j11)?;
        let picked = select_eigenpairs(Spectrum::General(&eig), selection, &current.v, &j11)?;
        let mut out = orthonormalize(picked)?;
        out.inner_residual = Some(coupled_residual(&jac, &out.iterate.v).0);
        return Ok(out);
    }

    let complement = orthogonal_complement(&current.v)?;
    let m = n - p;
    let retract = |x: &[f64]| -> Option<Mat> {
        let xm = Mat::from_column_slice(m, p, x);
        thin_qr(&(&current.v + &complement * xm)).ok().map(|(q, _)| q)
    };
    let objective = |x: &[f64]| match retract(x) {
        Some(v) => coupled_residual(&jac, &v).0,
        None => f64::INFINITY,
    };
    let opts = SimplexOptions {
        max_evals: budget,
        ..SimplexOptions::default()
    };
    let result = simplex::minimize(objective, &vec![0.0; m * p], &opts);
    if !(result.value < result.start_value) {
        return Err(NepvError::InnerSolverStalled {
            start: result.start_value,
            best: result.value,
        });
    }
    let v = retract(&result.x).ok_or(NepvError::RankDeficient {
        smallest: 0.0,
        norm: 1.0,
    })?;
    let (r, s) = coupled_residual(&jac, &v);
    log::debug!(
        "inner simplex: {} evaluations, r {:.3e} -> {:.3e}",
        result.evaluations,
        result.start_value,
        r
    );
    let mut out = StepOutput::new(SubspaceIterate { v, s });
    out.inner_residual = Some(r);
    Ok(out)
}

/// One Newton step on `F(V, S) = 0` with the bordered Jacobian. For
/// `p > 1` the bordered matrix has repeated rows (the constraint block is
/// symmetric), so the minimum-norm least-squares step is taken.
pub fn step_newton<P: NepvProblem + ?Sized>(problem: &P, current: &SubspaceIterate) -> Result<StepOutput> {
    let (n, p) = current.v.shape();
    let np = n * p;
    let res = residual(problem, current)?;
    let fpj = fixed_point_jacobian(problem, current)?;
    let mut rhs = Vector::zeros(np + p * p);
    rhs.rows_mut(0, np).copy_from(&(-&res.block1));
    rhs.rows_mut(np, p * p).copy_from(&(-&res.block2));
    let delta = if p == 1 {
        lu_solve(&fpj.matrix, &rhs).map_err(|e| match e {
            NepvError::Singular(_) => NepvError::Singular(fpj.smallest_singular_value()),
            other => other,
        })?
    } else {
        lstsq(&fpj.matrix, &rhs)
    };
    let dv = unvectorize(&delta.as_slice()[..np], n, p)?;
    let ds = unvectorize(&delta.as_slice()[np..], p, p)?;
    Ok(StepOutput::new(SubspaceIterate {
        v: &current.v + dv,
        s: &current.s + ds,
    }))
}

/// `J(v_k) w = v_k`, `v_{k+1} = w / ‖w‖`; `λ_{k+1}` is the Rayleigh
/// quotient of `A(v_{k+1})`.
pub fn step_j_inverse<P: NepvProblem + ?Sized>(problem: &P, current: &SubspaceIterate) -> Result<StepOutput> {
    if current.block_size() != 1 {
        return Err(NepvError::InvalidArgument("j_inverse needs p = 1".into()));
    }
    let v = current.vec_v();
    let jac = jacobian_or_fd(problem, &v)?;
    let mut w = lu_solve(&jac, &v)?;
    let norm = w.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(NepvError::Singular(0.0));
    }
    w /= norm;
    if w.dot(&v) < 0.0 {
        w.neg_mut();
    }
    let vm = Mat::from_column_slice(w.len(), 1, w.as_slice());
    let lambda = w.dot(&(problem.matrix(&vm)? * &w));
    Ok(StepOutput::new(SubspaceIterate::from_vector(w, lambda)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::orth_defect;
    use crate::problems::{HeavisideTraceProblem, LinearProblem, ScalarSineProblem};
    use crate::rng;

    #[test]
    fn a_version_linear_problem_is_exact() {
        let mut r = rng::seeded(1);
        let a0 = rng::symmetric_matrix(&mut r, 6);
        let problem = LinearProblem::new(a0.clone(), 2);
        let v0 = rng::orthonormal_matrix(&mut r, 6, 2);
        let it = SubspaceIterate::with_rayleigh_block(&problem, v0).unwrap();
        let out = step_a_version(&problem, &it, &SelectionStrategy::smallest_p()).unwrap();
        assert!(residual(&problem, &out.iterate).unwrap().norm <= 1e-10);
        assert!(orth_defect(&out.iterate.v) <= 1e-12);
    }

    #[test]
    fn j_version_p1_linear_problem_is_exact() {
        let problem = ScalarSineProblem::new(0.0);
        let mut r = rng::seeded(2);
        let v0 = rng::orthonormal_matrix(&mut r, 4, 1);
        let it = SubspaceIterate::with_rayleigh_block(&problem, v0).unwrap();
        let out = step_j_version_p1(&problem, &it, &SelectionStrategy::smallest_p()).unwrap();
        assert!(residual(&problem, &out.iterate).unwrap().norm <= 1e-10);
        let lowest = problem.a0.symmetric_eigenvalues().min();
        assert!((out.eigenvalues[0] - lowest).abs() < 1e-12);
    }

    #[test]
    fn j_version_subspace_exact_at_alpha_zero() {
        let problem = HeavisideTraceProblem::new(10, 3, 0.0).unwrap();
        let mut r = rng::seeded(3);
        let v0 = rng::orthonormal_matrix(&mut r, 10, 3);
        let it = SubspaceIterate::with_rayleigh_block(&problem, v0).unwrap();
        let out = step_j_version_subspace(&problem, &it, &SelectionStrategy::smallest_p(), 5000).unwrap();
        assert!(residual(&problem, &out.iterate).unwrap().norm <= 1e-8);
        assert!(out.inner_residual.unwrap() <= 1e-16);
    }

    #[test]
    fn j_version_subspace_reduces_inner_residual() {
        let problem = HeavisideTraceProblem::new(10, 3, 0.5).unwrap();
        let a0 = crate::kernel::sym_eig(crate::SplitProblem::linear_part(&problem)).unwrap();
        let v0 = a0.eigenvectors.columns(0, 3).into_owned();
        let it = SubspaceIterate::with_rayleigh_block(&problem, v0).unwrap();
        let jac = problem.jacobian(&it.vec_v()).unwrap();
        let start = coupled_residual(&jac, &it.v).0;
        let out = step_j_version_subspace(&problem, &it, &SelectionStrategy::smallest_p(), 2000).unwrap();
        assert!(out.inner_residual.unwrap() < start);
        assert!(orth_defect(&out.iterate.v) <= 1e-12);
        assert_eq!(out.iterate.s, out.iterate.s.transpose());
    }

    #[test]
    fn newton_at_solution_does_not_move() {
        let problem = ScalarSineProblem::new(0.0);
        let eig = crate::kernel::sym_eig(&problem.a0).unwrap();
        let v = eig.eigenvectors.column(1).into_owned();
        let it = SubspaceIterate::from_vector(v, eig.eigenvalues[1]);
        let out = step_newton(&problem, &it).unwrap();
        assert!((out.iterate.v - &it.v).norm() < 1e-14);
        assert!((out.iterate.s - &it.s).norm() < 1e-13);
    }

    #[test]
    fn j_inverse_linear_is_inverse_iteration() {
        let a0 = Mat::from_diagonal(&Vector::from_vec(vec![-0.5, 2.0, 3.0]));
        let problem = LinearProblem::new(a0, 1);
        let v = Vector::from_vec(vec![1.0, 1.0, 1.0]).normalize();
        let out = step_j_inverse(&problem, &SubspaceIterate::from_vector(v, 0.0)).unwrap();
        let w = out.iterate.v.column(0);
        assert!(w[0].abs() > w[1].abs() && w[0].abs() > w[2].abs());
        assert!(w[0] > 0.0);
    }

    #[test]
    fn fd_fallback_matches_analytic() {
        let problem = ScalarSineProblem::new(0.5);
        let v = Vector::from_element(4, 0.5);
        let lin = LinearProblem::new(problem.a0.clone(), 1).without_jacobian();
        let fd = jacobian_or_fd(&lin, &v).unwrap();
        assert!((fd - &problem.a0).norm() < 1e-8);
    }
}
