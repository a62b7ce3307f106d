//! Empirical checks of the convergence theory.

mod diagnostics;
mod order;
mod single_step;

pub use diagnostics::{jacobian_diagnostics, JacobianDiagnostics, NEAR_SINGULAR};
pub use order::{estimate_order, estimate_order_from_errors, loglog_fit, OrderEstimate, ERROR_FLOOR, MIN_POINTS};
pub use single_step::{single_step_study, SingleStepModel, SingleStepReport};
