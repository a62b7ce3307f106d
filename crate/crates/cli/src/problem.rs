use nepv_core::kernel::sym_eig;
use nepv_core::problems::{GpeProblem, HeavisideTraceProblem, ScalarSineProblem};
use nepv_core::{rng, Mat, NepvProblem, Result, SplitProblem, Vector};

use crate::config::{InitialGuess, ProblemConfig};

/// Any of the built-in problem families.
#[derive(Debug, Clone)]
pub enum AnyProblem {
    ScalarSine(ScalarSineProblem),
    Gpe(GpeProblem),
    Heaviside(HeavisideTraceProblem),
}

impl AnyProblem {
    pub fn build(config: &ProblemConfig) -> Result<Self> {
        Ok(match config {
            ProblemConfig::ScalarSine { alpha } => AnyProblem::ScalarSine(ScalarSineProblem::new(*alpha)),
            ProblemConfig::Gpe(params) => AnyProblem::Gpe(GpeProblem::build(params.clone())?),
            ProblemConfig::Heaviside { n, p, alpha } => {
                AnyProblem::Heaviside(HeavisideTraceProblem::new(*n, *p, *alpha)?)
            }
        })
    }

    fn inner(&self) -> &dyn SplitProblem {
        match self {
            AnyProblem::ScalarSine(p) => p,
            AnyProblem::Gpe(p) => p,
            AnyProblem::Heaviside(p) => p,
        }
    }

    pub fn initial_guess(&self, kind: InitialGuess, seed: u64) -> Result<Mat> {
        let (n, p) = (self.dim(), self.block_size());
        match kind {
            InitialGuess::Ones => Ok(Mat::from_element(n, p, 1.0 / (n as f64).sqrt())),
            InitialGuess::Random => Ok(rng::orthonormal_matrix(&mut rng::seeded(seed), n, p)),
            InitialGuess::LinearGround => {
                let eig = sym_eig(self.linear_part())?;
                Ok(eig.eigenvectors.columns(0, p).into_owned())
            }
        }
    }
}

impl NepvProblem for AnyProblem {
    fn name(&self) -> &'static str {
        self.inner().name()
    }
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn block_size(&self) -> usize {
        self.inner().block_size()
    }
    fn alpha(&self) -> f64 {
        self.inner().alpha()
    }
    fn is_basis_invariant(&self) -> bool {
        self.inner().is_basis_invariant()
    }
    fn has_analytic_jacobian(&self) -> bool {
        self.inner().has_analytic_jacobian()
    }
    fn matrix(&self, v: &Mat) -> Result<Mat> {
        self.inner().matrix(v)
    }
    fn jacobian(&self, v: &Vector) -> Result<Mat> {
        self.inner().jacobian(v)
    }
}

impl SplitProblem for AnyProblem {
    fn linear_part(&self) -> &Mat {
        self.inner().linear_part()
    }
    fn nonlinear_part(&self, v: &Mat) -> Result<Mat> {
        self.inner().nonlinear_part(v)
    }
}
