use crate::{Mat, NepvError, Result, Vector};

/// Central-difference Jacobian of `f` at `x`: column `j` is
/// `(f(x + h eⱼ) − f(x − h eⱼ)) / 2h`.
pub fn fd_jacobian<F>(f: F, x: &Vector, h: f64) -> Result<Mat>
where
    F: Fn(&Vector) -> Result<Vector>,
{
    if !(h > 0.0) {
        return Err(NepvError::InvalidArgument(format!("step h must be positive, got {h}")));
    }
    let mut jac: Option<Mat> = None;
    let mut probe = x.clone();
    for j in 0..x.len() {
        probe[j] = x[j] + h;
        let plus = f(&probe)?;
        probe[j] = x[j] - h;
        let minus = f(&probe)?;
        probe[j] = x[j];
        if plus.iter().chain(minus.iter()).any(|y| !y.is_finite()) {
            return Err(NepvError::NonFinite);
        }
        let out = jac.get_or_insert_with(|| Mat::zeros(plus.len(), x.len()));
        out.set_column(j, &((plus - minus) / (2.0 * h)));
    }
    Ok(jac.unwrap_or_else(|| Mat::zeros(0, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn linear_map_is_exact() {
        let mut r = rng::seeded(6);
        let m = rng::gaussian_matrix(&mut r, 4, 3);
        let x = rng::gaussian_vector(&mut r, 3);
        let jac = fd_jacobian(|y| Ok(&m * y), &x, 1e-5).unwrap();
        assert!((jac - &m).norm() < 1e-10);
    }

    #[test]
    fn squares_and_second_order_accuracy() {
        let x = Vector::from_vec(vec![1.0, 2.0]);
        let sq = |y: &Vector| Ok(y.component_mul(y));
        let jac = fd_jacobian(sq, &x, 1e-4).unwrap();
        let exact = Mat::from_diagonal(&Vector::from_vec(vec![2.0, 4.0]));
        assert!((jac - &exact).norm() < 1e-8);

        // Cubic map: the central-difference error is h², so halving h quarters it.
        let cube = |y: &Vector| Ok(y.map(|t| t * t * t));
        let exact = Mat::from_diagonal(&x.map(|t| 3.0 * t * t));
        let e1 = (fd_jacobian(cube, &x, 1e-2).unwrap() - &exact).norm();
        let e2 = (fd_jacobian(cube, &x, 5e-3).unwrap() - &exact).norm();
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn non_finite_is_reported() {
        let x = Vector::from_vec(vec![0.0]);
        let r = fd_jacobian(|y| Ok(y.map(|t| 1.0 / (t - 1e-3))), &x, 1e-3);
        assert_eq!(r.unwrap_err(), NepvError::NonFinite);
        assert!(fd_jacobian(|y| Ok(y.clone()), &x, 0.0).is_err());
    }
}
