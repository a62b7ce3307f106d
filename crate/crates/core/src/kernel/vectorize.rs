use crate::{Mat, NepvError, Result, Vector};

/// Column-major stacking of the columns of `m`.
pub fn vectorize(m: &Mat) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(x: &[f64], rows: usize, cols: usize) -> Result<Mat> {
    if x.len() != rows * cols {
        return Err(NepvError::DimensionMismatch(format!(
            "vector of length {} cannot be reshaped to {rows}x{cols}",
            x.len()
        )));
    }
    Ok(Mat::from_column_slice(rows, cols, x))
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// The `n² × n²` permutation `P` with `P vec(Wᵀ) = vec(W)` for every `n × n`
/// matrix `W`. It is its own inverse.
pub fn shuffle_matrix(n: usize) -> Mat {
    let mut p = Mat::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            // vec(W)[i + n j] = W[i, j] = Wᵀ[j, i] = vec(Wᵀ)[j + n i]
            p[(i + n * j, j + n * i)] = 1.0;
        }
    }
    p
}
