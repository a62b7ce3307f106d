use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NepvError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is rank deficient (smallest singular value {smallest:e}, norm {norm:e})")]
    RankDeficient { smallest: f64, norm: f64 },

    #[error("matrix has a significantly negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),

    #[error("basis is not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("problem `{0}` provides no analytic Jacobian")]
    NoAnalyticJacobian(&'static str),

    #[error("matrix is numerically singular (smallest pivot or singular value {0:e})")]
    Singular(f64),

    #[error("eigenpair selection failed: {0}")]
    SelectionFailed(String),

    #[error("inner solver failed to reduce the residual (start {start:e}, best {best:e})")]
    InnerSolverStalled { start: f64, best: f64 },

    #[error("eigenvalue iteration did not converge")]
    EigenNoConvergence,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a solution: residual {0:e}")]
    NotASolution(f64),

    #[error("reference solve failed at alpha = {alpha}: {reason}")]
    ReferenceFailed { alpha: f64, reason: String },

    #[error("too few usable error values for an order estimate ({found} found, {needed} needed)")]
    TooFewPoints { found: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, NepvError>;
