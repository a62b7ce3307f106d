//! Solvers for eigenvector-dependent nonlinear eigenvalue problems (NEPv).
//!
//! The problems have the form `A(V) V = V S`, `VᵀV = I`, where the symmetric
//! matrix `A` depends on the sought `n × p` basis `V`. For `p = 1` this is
//! `A(v) v = λ v` with `‖v‖ = 1`.
//!
//! The crate is organised bottom-up:
//!
//! * [`kernel`] holds the dense linear-algebra primitives (vectorization,
//!   Kronecker products, symmetric and general eigensolvers, thin QR, the
//!   matrix heaviside function and a finite-difference Jacobian oracle).
//! * [`nepv`] defines the [`NepvProblem`] abstraction together with the
//!   residual, the bordered fixed-point Jacobian and error metrics.
//! * [`problems`] contains the concrete problem families.
//! * [`solvers`] implements the SCF iteration (A-version), the Jacobian
//!   based J-version, Newton's method and J-inverse iteration.
//! * [`analysis`] estimates convergence orders, runs the single-step error
//!   study and checks the fixed-point Jacobian.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod kernel;
pub mod nepv;
pub mod problems;
pub mod rng;
pub mod solvers;

pub use nalgebra::{DMatrix, DVector};

/// Dense real matrix, stored column-major.
pub type Mat = DMatrix<f64>;
/// Dense real column vector.
pub type Vector = DVector<f64>;

pub use error::{NepvError, Result};
pub use nepv::{NepvProblem, SplitProblem, SubspaceIterate};
