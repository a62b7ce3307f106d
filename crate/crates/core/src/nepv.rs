//! The problem abstraction `A(V) V = V S`, `VᵀV = I`, and the structural
//! objects built from it: the vectorized residual `F(V, S)`, the bordered
//! fixed-point Jacobian and basis-independent error metrics.

use crate::kernel::{frobenius_asymmetry, kron, orth_defect, symmetrize, unvectorize, vectorize};
use crate::{Mat, NepvError, Result, Vector};

/// An eigenvector-dependent nonlinear eigenvalue problem.
///
/// `matrix` evaluates `A(V)` for an `n × p` matrix `V`; `jacobian` evaluates
/// the left-hand-side Jacobian `J(v) = d/dv (I_p ⊗ A(V)) v` at `v = vec(V)`.
pub trait NepvProblem: Send + Sync {
    fn name(&self) -> &'static str;

    /// Ambient dimension `n`.
    fn dim(&self) -> usize;

    /// Subspace dimension `p`.
    fn block_size(&self) -> usize;

    /// Nonlinearity strength.
    fn alpha(&self) -> f64;

    /// `A(VP) = A(V)` for every nonsingular `P`.
    fn is_basis_invariant(&self) -> bool {
        true
    }

    fn has_analytic_jacobian(&self) -> bool {
        true
    }

    fn matrix(&self, v: &Mat) -> Result<Mat>;

    fn jacobian(&self, v: &Vector) -> Result<Mat>;
}

/// Problems with the split `A(v) = A₀ + α C(v)`.
pub trait SplitProblem: NepvProblem {
    fn linear_part(&self) -> &Mat;

    /// `C(V)`.
    fn nonlinear_part(&self, v: &Mat) -> Result<Mat>;
}

impl<P: NepvProblem + ?Sized> NepvProblem for Box<P> {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn block_size(&self) -> usize {
        (**self).block_size()
    }
    fn alpha(&self) -> f64 {
        (**self).alpha()
    }
    fn is_basis_invariant(&self) -> bool {
        (**self).is_basis_invariant()
    }
    fn has_analytic_jacobian(&self) -> bool {
        (**self).has_analytic_jacobian()
    }
    fn matrix(&self, v: &Mat) -> Result<Mat> {
        (**self).matrix(v)
    }
    fn jacobian(&self, v: &Vector) -> Result<Mat> {
        (**self).jacobian(v)
    }
}

/// An iterate `(V, S)`: `V` is `n × p`, `S` is `p × p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceIterate {
    pub v: Mat,
    pub s: Mat,
}

impl SubspaceIterate {
    pub fn new(v: Mat, s: Mat) -> Result<Self> {
        let p = v.ncols();
        if s.shape() != (p, p) {
            return Err(NepvError::DimensionMismatch(format!(
                "S must be {p}x{p}, got {}x{}",
                s.nrows(),
                s.ncols()
            )));
        }
        Ok(Self { v, s })
    }

    /// `p = 1` iterate `(v, λ)`.
    pub fn from_vector(v: Vector, lambda: f64) -> Self {
        let n = v.len();
        Self {
            v: Mat::from_column_slice(n, 1, v.as_slice()),
            s: Mat::from_element(1, 1, lambda),
        }
    }

    /// `(V, Vᵀ A(V) V)`: the best symmetric `S` for a given orthonormal `V`.
    pub fn with_rayleigh_block<P: NepvProblem + ?Sized>(problem: &P, v: Mat) -> Result<Self> {
        let a = problem.matrix(&v)?;
        let s = symmetrize(&(v.transpose() * a * &v));
        Ok(Self { v, s })
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    pub fn block_size(&self) -> usize {
        self.v.ncols()
    }

    pub fn vec_v(&self) -> Vector {
        vectorize(&self.v)
    }

    pub fn orth_defect(&self) -> f64 {
        orth_defect(&self.v)
    }

    /// Eigenvalues of the symmetric part of `S`, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = symmetrize(&self.s).symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// `F(V, S) = [vec(A(V)V − VS); vec(VᵀV − I)]`.
#[derive(Debug, Clone)]
pub struct ResidualValue {
    pub block1: Vector,
    pub block2: Vector,
    pub norm: f64,
}

/// Bordered Jacobian of `F` at `(V, S)`:
/// `[[J(v) − Sᵀ ⊗ I_n, −I_p ⊗ V], [Z, 0]]`.
#[derive(Debug, Clone)]
pub struct FixedPointJacobian {
    pub matrix: Mat,
    pub n: usize,
    pub p: usize,
}

impl FixedPointJacobian {
    /// Singular values, computed on demand.
    pub fn singular_values(&self) -> Vector {
        self.matrix.singular_values()
    }

    pub fn smallest_singular_value(&self) -> f64 {
        self.singular_values().min()
    }

    /// Block `(i, j)` with `i, j ∈ {0, 1}`.
    pub fn block(&self, i: usize, j: usize) -> Mat {
        let np = self.n * self.p;
        let pp = self.p * self.p;
        let (r0, nr) = if i == 0 { (0, np) } else { (np, pp) };
        let (c0, nc) = if j == 0 { (0, np) } else { (np, pp) };
        self.matrix.view((r0, c0), (nr, nc)).into_owned()
    }
}

/// `A(V)` with input validation: `V` must be orthonormal (to 1e-8) unless
/// the problem is basis invariant, and the output must be symmetric.
pub fn eval_a<P: NepvProblem + ?Sized>(problem: &P, v: &Mat) -> Result<Mat> {
    check_shape(problem, v)?;
    if !problem.is_basis_invariant() {
        let defect = orth_defect(v);
        if defect > 1e-8 {
            return Err(NepvError::NotOrthonormal(defect));
        }
    }
    let a = problem.matrix(v)?;
    let asym = frobenius_asymmetry(&a);
    if asym > 1e-12 {
        return Err(NepvError::NotSymmetric(asym));
    }
    Ok(a)
}

/// `J(v)`; fails when the problem has no analytic Jacobian (callers fall
/// back to [`crate::kernel::fd_jacobian`]).
pub fn eval_j<P: NepvProblem + ?Sized>(problem: &P, v: &Vector) -> Result<Mat> {
    if !problem.has_analytic_jacobian() {
        return Err(NepvError::NoAnalyticJacobian(problem.name()));
    }
    if v.len() != problem.dim() * problem.block_size() {
        return Err(NepvError::DimensionMismatch(format!(
            "v has length {}, expected {}",
            v.len(),
            problem.dim() * problem.block_size()
        )));
    }
    if v.norm() == 0.0 {
        return Err(NepvError::ZeroVector);
    }
    problem.jacobian(v)
}

/// The map `v ↦ (I_p ⊗ A(V)) v = vec(A(V) V)`.
pub fn lhs_map<P: NepvProblem + ?Sized>(problem: &P, v: &Vector) -> Result<Vector> {
    let vm = unvectorize(v.as_slice(), problem.dim(), problem.block_size())?;
    let a = problem.matrix(&vm)?;
    Ok(vectorize(&(a * vm)))
}

pub fn residual<P: NepvProblem + ?Sized>(problem: &P, iterate: &SubspaceIterate) -> Result<ResidualValue> {
    check_shape(problem, &iterate.v)?;
    let v = &iterate.v;
    let p = v.ncols();
    let a = problem.matrix(v)?;
    let block1 = vectorize(&(a * v - v * &iterate.s));
    let block2 = vectorize(&(v.transpose() * v - Mat::identity(p, p)));
    let norm = (block1.norm_squared() + block2.norm_squared()).sqrt();
    Ok(ResidualValue {
        block1,
        block2,
        norm,
    })
}

/// The `p² × np` matrix `Z` with `Z vec(W) = vec(WᵀV + VᵀW)`.
pub fn orthogonality_derivative(v: &Mat) -> Mat {
    let (n, p) = v.shape();
    let mut z = Mat::zeros(p * p, n * p);
    for c in 0..p {
        for k in 0..n {
            // W = E_{k,c}: WᵀV has row c equal to row k of V; VᵀW has column c
            // equal to (row k of V)ᵀ.
            let col = k + n * c;
            for j in 0..p {
                z[(c + p * j, col)] += v[(k, j)];
                z[(j + p * c, col)] += v[(k, j)];
            }
        }
    }
    z
}

pub fn fixed_point_jacobian<P: NepvProblem + ?Sized>(
    problem: &P,
    iterate: &SubspaceIterate,
) -> Result<FixedPointJacobian> {
    check_shape(problem, &iterate.v)?;
    let (n, p) = iterate.v.shape();
    let np = n * p;
    let pp = p * p;
    let jac = eval_j(problem, &iterate.vec_v())?;
    let mut m = Mat::zeros(np + pp, np + pp);
    let b11 = jac - kron(&iterate.s.transpose(), &Mat::identity(n, n));
    let b12 = -kron(&Mat::identity(p, p), &iterate.v);
    let b21 = orthogonality_derivative(&iterate.v);
    m.view_mut((0, 0), (np, np)).copy_from(&b11);
    m.view_mut((0, np), (np, pp)).copy_from(&b12);
    m.view_mut((np, 0), (pp, np)).copy_from(&b21);
    Ok(FixedPointJacobian { matrix: m, n, p })
}

/// Distance between the iterates' subspaces. For `p = 1` this is
/// `min_σ ‖σ v − v_ref‖` over signs; for `p > 1` it is the projector distance
/// `‖V Vᵀ − V_ref V_refᵀ‖_F`.
pub fn subspace_error(v: &Mat, v_ref: &Mat) -> f64 {
    assert_eq!(v.shape(), v_ref.shape(), "subspace_error: shape mismatch");
    if v.ncols() == 1 {
        let plus = (v - v_ref).norm();
        let minus = (v + v_ref).norm();
        plus.min(minus)
    } else {
        (v * v.transpose() - v_ref * v_ref.transpose()).norm()
    }
}

fn check_shape<P: NepvProblem + ?Sized>(problem: &P, v: &Mat) -> Result<()> {
    if v.shape() != (problem.dim(), problem.block_size()) {
        return Err(NepvError::DimensionMismatch(format!(
            "V must be {}x{}, got {}x{}",
            problem.dim(),
            problem.block_size(),
            v.nrows(),
            v.ncols()
        )));
    }
    Ok(())
}
