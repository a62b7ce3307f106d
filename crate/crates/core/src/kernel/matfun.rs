use super::decomp::sym_eig;
use crate::{Mat, NepvError, Result};

/// Eigenvalues at or below `RANK_THRESHOLD · ‖M‖₂` count as zero in
/// [`heaviside_psd`].
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Matrix heaviside function of a symmetric positive semidefinite matrix:
/// `Q h(Λ) Qᵀ` with `h(λ) = 1` for `λ > RANK_THRESHOLD · ‖M‖₂` and zero
/// otherwise. For `M = W Wᵀ` with `W` of full column rank this is the
/// orthogonal projector onto `range(W)`.
pub fn heaviside_psd(m: &Mat) -> Result<Mat> {
    let eig = sym_eig(m)?;
    let n = eig.dim();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let norm2 = eig.eigenvalues[0].abs().max(eig.eigenvalues[n - 1].abs());
    let lowest = eig.eigenvalues[0];
    if lowest < -1e-10 * norm2 {
        return Err(NepvError::NegativeEigenvalue(lowest));
    }
    let cut = RANK_THRESHOLD * norm2;
    let kept: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > cut).collect();
    let q = eig.eigenvectors.select_columns(kept.iter());
    Ok(&q * q.transpose())
}

/// Fréchet derivative of the (shifted) heaviside function at the projector
/// `P = V Vᵀ` in direction `E`, for `V` with orthonormal columns:
/// `(I − P) E P + P E (I − P)`.
pub fn projector_frechet(v: &Mat, e: &Mat) -> Mat {
    let n = v.nrows();
    let p = v * v.transpose();
    let q = Mat::identity(n, n) - &p;
    &q * e * &p + &p * e * &q
}
