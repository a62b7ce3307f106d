//! Dense linear-algebra primitives.
//!
//! Everything here is a pure function of its inputs. Vectorization is
//! column-major throughout so that `vec(B X Aᵀ) = (A ⊗ B) vec(X)` holds.

mod decomp;
mod fd;
mod general_eig;
mod matfun;
mod vectorize;

pub use decomp::{
    frobenius_asymmetry, lstsq, lu_solve, orthogonal_complement, sym_eig, symmetrize, thin_qr,
    SymEigDecomposition,
};
pub use fd::fd_jacobian;
pub use general_eig::{real_eigen, RealEigen};
pub use matfun::{heaviside_psd, projector_frechet, RANK_THRESHOLD};
pub use vectorize::{kron, shuffle_matrix, unvectorize, vectorize};

use crate::{Mat, NepvError, Result};

pub(crate) fn ensure_finite(m: &Mat) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(NepvError::NonFinite)
    }
}

/// `‖VᵀV − I‖_F`.
pub fn orth_defect(v: &Mat) -> f64 {
    let p = v.ncols();
    (v.transpose() * v - Mat::identity(p, p)).norm()
}
