use std::fmt;
use std::str::FromStr;

use crate::{NepvError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Self-consistent field iteration on `A(V_k)`.
    AVersion,
    /// Eigenproblem of the left-hand-side Jacobian `J(v_k)`.
    JVersion,
    /// Newton's method on `F(V, S) = 0`.
    Newton,
    /// `J(v_k) w = v_k`, normalized.
    JInverse,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::AVersion, Method::JVersion, Method::Newton, Method::JInverse];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::AVersion => "a_version",
            Method::JVersion => "j_version",
            Method::Newton => "newton",
            Method::JInverse => "j_inverse",
        }
    }

    /// Produces orthonormal iterates by construction.
    pub fn preserves_orthonormality(self) -> bool {
        !matches!(self, Method::Newton)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = NepvError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                NepvError::InvalidArgument(format!(
                    "unknown method `{s}` (expected a_version, j_version, newton or j_inverse)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionKind {
    SmallestP,
    NearestTarget,
    ClusterLstsq,
}

impl SelectionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionKind::SmallestP => "smallest_p",
            SelectionKind::NearestTarget => "nearest_target",
            SelectionKind::ClusterLstsq => "cluster_lstsq",
        }
    }
}

impl FromStr for SelectionKind {
    type Err = NepvError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smallest_p" => Ok(SelectionKind::SmallestP),
            "nearest_target" => Ok(SelectionKind::NearestTarget),
            "cluster_lstsq" => Ok(SelectionKind::ClusterLstsq),
            _ => Err(NepvError::InvalidArgument(format!(
                "unknown selection `{s}` (expected smallest_p, nearest_target or cluster_lstsq)"
            ))),
        }
    }
}

/// Where `nearest_target` and `cluster_lstsq` aim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Value(f64),
    /// Rayleigh quotient of the previous iterate with the decomposed matrix
    /// (mean over columns for `p > 1`).
    RayleighQuotient,
    /// Smallest admissible eigenvalue of the decomposed matrix.
    Smallest,
}

impl FromStr for Target {
    type Err = NepvError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rayleigh" | "rq" => Ok(Target::RayleighQuotient),
            "smallest" => Ok(Target::Smallest),
            _ => s.parse::<f64>().map(Target::Value).map_err(|_| {
                NepvError::InvalidArgument(format!(
                    "invalid target `{s}` (expected a number, `rayleigh` or `smallest`)"
                ))
            }),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Value(t) => write!(f, "{t}"),
            Target::RayleighQuotient => f.write_str("rayleigh"),
            Target::Smallest => f.write_str("smallest"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionStrategy {
    pub kind: SelectionKind,
    pub target: Target,
    /// Cluster radius, in `(0, 1)`.
    pub delta: f64,
}

impl Default for SelectionStrategy {
    fn default() -> Self {
        Self::smallest_p()
    }
}

impl SelectionStrategy {
    pub fn smallest_p() -> Self {
        Self {
            kind: SelectionKind::SmallestP,
            target: Target::RayleighQuotient,
            delta: 0.1,
        }
    }

    pub fn nearest(target: Target) -> Self {
        Self {
            kind: SelectionKind::NearestTarget,
            target,
            delta: 0.1,
        }
    }

    pub fn cluster(target: Target, delta: f64) -> Result<Self> {
        let s = Self {
            kind: SelectionKind::ClusterLstsq,
            target,
            delta,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == SelectionKind::ClusterLstsq && !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(NepvError::InvalidArgument(format!(
                "cluster radius delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if let Target::Value(t) = self.target {
            if !t.is_finite() {
                return Err(NepvError::InvalidArgument(format!("target must be finite, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Stop once `‖F(V, S)‖ ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub selection: SelectionStrategy,
    /// Objective evaluations allowed per inner solve of the `p > 1`
    /// J-version.
    pub inexact_budget: usize,
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            tol: 1e-10,
            max_iter: 200,
            selection: SelectionStrategy::default(),
            inexact_budget: 5000,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_selection(mut self, selection: SelectionStrategy) -> Self {
        self.selection = selection;
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.inexact_budget = budget;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(NepvError::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(NepvError::InvalidArgument("max_iter must be at least 1".into()));
        }
        if self.inexact_budget == 0 {
            return Err(NepvError::InvalidArgument("inexact_budget must be at least 1".into()));
        }
        self.selection.validate()
    }
}
