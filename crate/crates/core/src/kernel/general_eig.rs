//! Eigenpairs of a general (nonsymmetric) real matrix via LAPACK `dgeev`.
//! Only real eigenpairs are exposed with eigenvectors.

use std::os::raw::{c_char, c_int};

use num_complex::Complex64;

use super::ensure_finite;
use crate::{Mat, NepvError, Result, Vector};

/// Eigenvalues of a real matrix together with the right eigenvectors of its
/// real eigenvalues.
#[derive(Debug, Clone)]
pub struct RealEigen {
    eigenvalues: Vec<Complex64>,
    vectors: Mat,
}

pub fn real_eigen(m: &Mat) -> Result<RealEigen> {
    if !m.is_square() {
        return Err(NepvError::DimensionMismatch(format!(
            "real_eigen needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    ensure_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(RealEigen {
            eigenvalues: Vec::new(),
            vectors: Mat::zeros(0, 0),
        });
    }
    let ni = c_int::try_from(n).map_err(|_| NepvError::InvalidArgument(format!("matrix too large: {n}")))?;
    let mut a = m.clone();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut vl = [0.0f64; 1];
    let mut vr = Mat::zeros(n, n);
    let mut info: c_int = 0;
    let jobvl = b'N' as c_char;
    let jobvr = b'V' as c_char;
    let one: c_int = 1;

    let mut query = [0.0f64; 1];
    let lwork_query: c_int = -1;
    // SAFETY: every pointer refers to a live buffer of the size LAPACK
    // expects for an n×n problem with column-major storage.
    unsafe {
        lapack_sys::dgeev_(
            &jobvl, &jobvr, &ni, a.as_mut_ptr(), &ni, wr.as_mut_ptr(), wi.as_mut_ptr(),
            vl.as_mut_ptr(), &one, vr.as_mut_ptr(), &ni, query.as_mut_ptr(), &lwork_query, &mut info,
        );
    }
    if info != 0 {
        return Err(NepvError::InvalidArgument(format!("dgeev workspace query failed (info {info})")));
    }
    let lwork = (query[0] as c_int).max(4 * ni);
    let mut work = vec![0.0; lwork as usize];
    // SAFETY: as above, with a workspace of the size LAPACK asked for.
    unsafe {
        lapack_sys::dgeev_(
            &jobvl, &jobvr, &ni, a.as_mut_ptr(), &ni, wr.as_mut_ptr(), wi.as_mut_ptr(),
            vl.as_mut_ptr(), &one, vr.as_mut_ptr(), &ni, work.as_mut_ptr(), &lwork, &mut info,
        );
    }
    if info > 0 {
        return Err(NepvError::EigenNoConvergence);
    }
    if info < 0 {
        return Err(NepvError::InvalidArgument(format!("dgeev argument {} invalid", -info)));
    }
    let eigenvalues = wr.iter().zip(&wi).map(|(&re, &im)| Complex64::new(re, im)).collect();
    Ok(RealEigen {
        eigenvalues,
        vectors: vr,
    })
}

impl RealEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Positions holding real eigenvalues.
    pub fn real_positions(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.is_real(i)).collect()
    }

    pub fn is_real(&self, pos: usize) -> bool {
        self.eigenvalues[pos].im == 0.0
    }

    /// Unit-norm eigenvector for the real eigenvalue at `pos`.
    pub fn eigenvector(&self, pos: usize) -> Result<Vector> {
        if pos >= self.dim() {
            return Err(NepvError::InvalidArgument(format!("no eigenvalue at position {pos}")));
        }
        if !self.is_real(pos) {
            return Err(NepvError::InvalidArgument(format!(
                "eigenvalue at position {pos} is complex"
            )));
        }
        let mut v = self.vectors.column(pos).into_owned();
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(NepvError::NonFinite);
        }
        v /= norm;
        Ok(v)
    }
}
