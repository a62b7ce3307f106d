use crate::nepv::{NepvProblem, SplitProblem};
use crate::{kernel, Mat, NepvError, Result, Vector};

/// `A(V) = A₀ + α C` with constant `C`. Every solver step is exact here,
/// which makes it a convenient baseline and test fixture.
#[derive(Debug, Clone)]
pub struct LinearProblem {
    a0: Mat,
    c: Mat,
    alpha: f64,
    p: usize,
    basis_invariant: bool,
    analytic_jacobian: bool,
}

impl LinearProblem {
    pub fn new(a0: Mat, p: usize) -> Self {
        let n = a0.nrows();
        Self::with_perturbation(a0, Mat::zeros(n, n), 0.0, p)
    }

    pub fn with_perturbation(a0: Mat, c: Mat, alpha: f64, p: usize) -> Self {
        Self {
            a0,
            c,
            alpha,
            p,
            basis_invariant: true,
            analytic_jacobian: true,
        }
    }

    /// Same matrix, but declared basis variant so that inputs are checked
    /// for orthonormality.
    pub fn basis_variant(a0: Mat, p: usize) -> Self {
        Self {
            basis_invariant: false,
            ..Self::new(a0, p)
        }
    }

    pub fn without_jacobian(self) -> Self {
        Self {
            analytic_jacobian: false,
            ..self
        }
    }

    fn full(&self) -> Mat {
        &self.a0 + &self.c * self.alpha
    }
}

impl NepvProblem for LinearProblem {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn dim(&self) -> usize {
        self.a0.nrows()
    }

    fn block_size(&self) -> usize {
        self.p
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn is_basis_invariant(&self) -> bool {
        self.basis_invariant
    }

    fn has_analytic_jacobian(&self) -> bool {
        self.analytic_jacobian
    }

    fn matrix(&self, _v: &Mat) -> Result<Mat> {
        Ok(self.full())
    }

    fn jacobian(&self, _v: &Vector) -> Result<Mat> {
        if !self.analytic_jacobian {
            return Err(NepvError::NoAnalyticJacobian(self.name()));
        }
        Ok(kernel::kron(&Mat::identity(self.p, self.p), &self.full()))
    }
}

impl SplitProblem for LinearProblem {
    fn linear_part(&self) -> &Mat {
        &self.a0
    }

    fn nonlinear_part(&self, _v: &Mat) -> Result<Mat> {
        Ok(self.c.clone())
    }
}
