use nalgebra::SymmetricEigen;

use super::ensure_finite;
use crate::{Mat, NepvError, Result, Vector};

/// Eigendecomposition `M = Q Λ Qᵀ` of a symmetric matrix, eigenvalues
/// ascending.
#[derive(Debug, Clone)]
pub struct SymEigDecomposition {
    pub eigenvalues: Vector,
    pub eigenvectors: Mat,
}

impl SymEigDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Q Λ Qᵀ`.
    pub fn reconstruct(&self) -> Mat {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= self.eigenvalues[j];
        }
        scaled * q.transpose()
    }
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// `‖M − Mᵀ‖_F / ‖M‖_F` (zero for the zero matrix).
pub fn frobenius_asymmetry(m: &Mat) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m - m.transpose()).norm() / norm
}

/// Symmetric eigendecomposition. The input is symmetrized as `(M + Mᵀ)/2`
/// first; eigenvalues come back sorted ascending with matching columns.
pub fn sym_eig(m: &Mat) -> Result<SymEigDecomposition> {
    if !m.is_square() {
        return Err(NepvError::DimensionMismatch(format!(
            "sym_eig needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    ensure_finite(m)?;
    let eig = SymmetricEigen::new(symmetrize(m));
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let eigenvalues = Vector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let eigenvectors = eig.eigenvectors.select_columns(order.iter());
    Ok(SymEigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Thin QR factorization `Y = Q R` with `Q` having orthonormal columns and
/// `R` upper triangular with a positive diagonal.
pub fn thin_qr(y: &Mat) -> Result<(Mat, Mat)> {
    let (n, p) = y.shape();
    if n < p || p == 0 {
        return Err(NepvError::DimensionMismatch(format!(
            "thin_qr needs rows >= cols >= 1, got {n}x{p}"
        )));
    }
    ensure_finite(y)?;
    let qr = y.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..p {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    let sv = r.singular_values();
    let (smallest, largest) = (sv.min(), sv.max());
    if !(smallest > 1e-12 * largest) || largest == 0.0 {
        return Err(NepvError::RankDeficient {
            smallest,
            norm: largest,
        });
    }
    Ok((q, r))
}

/// Least-squares solution of `A x ≈ b`; the minimum-norm solution when `A`
/// is rank deficient.
pub fn lstsq(a: &Mat, b: &Vector) -> Vector {
    assert_eq!(a.nrows(), b.len(), "lstsq: row count must match rhs length");
    if a.ncols() == 0 {
        return Vector::zeros(0);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let cutoff = smax * f64::EPSILON * a.nrows().max(a.ncols()) as f64;
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let mut x = Vector::zeros(a.ncols());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            let coef = u.column(k).dot(b) / s;
            x += vt.row(k).transpose() * coef;
        }
    }
    x
}

/// Solves `A x = b` by partial-pivoting LU, rejecting numerically singular
/// matrices.
pub fn lu_solve(a: &Mat, b: &Vector) -> Result<Vector> {
    if !a.is_square() || a.nrows() != b.len() {
        return Err(NepvError::DimensionMismatch(format!(
            "lu_solve: {}x{} matrix with rhs of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    ensure_finite(a)?;
    let lu = a.clone().lu();
    let u = lu.u();
    let scale = u.amax();
    let pivot = u.diagonal().amin();
    if !(pivot > f64::EPSILON * a.nrows() as f64 * scale) {
        return Err(NepvError::Singular(pivot));
    }
    lu.solve(b).ok_or(NepvError::Singular(pivot))
}

/// Orthonormal basis of the orthogonal complement of `range(V)` for `V`
/// with orthonormal columns.
pub fn orthogonal_complement(v: &Mat) -> Result<Mat> {
    let n = v.nrows();
    let p = v.ncols();
    let projector = Mat::identity(n, n) - v * v.transpose();
    let eig = sym_eig(&projector)?;
    // Eigenvalues are ~0 (p times) then ~1 (n − p times).
    Ok(eig.eigenvectors.columns(p, n - p).into_owned())
}
