//! Outer iterations, eigenpair selection and stopping logic.

mod config;
mod select;
pub mod simplex;
mod solve;
mod steps;

pub use config::{Method, SelectionKind, SelectionStrategy, SolverConfig, Target};
pub use select::{rayleigh_target, select_eigenpairs, Selection, Spectrum};
pub use solve::{
    diagonalize, prepare_initial, reference_solution, reference_solution_within, solve, solve_from, IterationTrace, Status, StepRecord,
    REFERENCE_TOL,
};
pub use steps::{
    jacobian_or_fd, step, step_a_version, step_j_inverse, step_j_version_p1, step_j_version_subspace,
    step_newton, StepOutput, FD_STEP,
};
