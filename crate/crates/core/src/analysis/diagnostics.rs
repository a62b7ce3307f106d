use crate::nepv::{fixed_point_jacobian, residual};
use crate::{NepvError, NepvProblem, Result, SubspaceIterate};

/// Relative smallest singular value below which the fixed-point Jacobian
/// is flagged as near singular.
pub const NEAR_SINGULAR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct JacobianDiagnostics {
    pub smallest_singular_value: f64,
    pub largest_singular_value: f64,
    pub condition_number: f64,
    pub near_singular: bool,
    pub residual: f64,
}

/// Conditioning of the bordered fixed-point Jacobian at a solution.
pub fn jacobian_diagnostics<P: NepvProblem + ?Sized>(
    problem: &P,
    solution: &SubspaceIterate,
) -> Result<JacobianDiagnostics> {
    let res = residual(problem, solution)?.norm;
    if res > 1e-8 {
        return Err(NepvError::NotASolution(res));
    }
    let sv = fixed_point_jacobian(problem, solution)?.singular_values();
    let smallest = sv.min();
    let largest = sv.max();
    Ok(JacobianDiagnostics {
        smallest_singular_value: smallest,
        largest_singular_value: largest,
        condition_number: if smallest > 0.0 { largest / smallest } else { f64::INFINITY },
        near_singular: smallest <= NEAR_SINGULAR * largest,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::LinearProblem;
    use crate::{Mat, Vector};

    fn eigen_iterate(a0: &Mat, k: usize) -> SubspaceIterate {
        let eig = crate::kernel::sym_eig(a0).unwrap();
        SubspaceIterate::from_vector(eig.eigenvectors.column(k).into_owned(), eig.eigenvalues[k])
    }

    #[test]
    fn distinct_eigenvalues_are_regular() {
        let a0 = Mat::from_diagonal(&Vector::from_vec(vec![1.0, 2.0, 4.0]));
        let problem = LinearProblem::new(a0.clone(), 1);
        let d = jacobian_diagnostics(&problem, &eigen_iterate(&a0, 1)).unwrap();
        assert!(!d.near_singular);
        assert!(d.smallest_singular_value > 0.5);
    }

    #[test]
    fn double_eigenvalue_is_flagged() {
        let a0 = Mat::from_diagonal(&Vector::from_vec(vec![1.0, 1.0, 4.0]));
        let problem = LinearProblem::new(a0.clone(), 1);
        let d = jacobian_diagnostics(&problem, &eigen_iterate(&a0, 0)).unwrap();
        assert!(d.near_singular);
    }

    #[test]
    fn rejects_non_solutions() {
        let a0 = Mat::from_diagonal(&Vector::from_vec(vec![1.0, 2.0]));
        let problem = LinearProblem::new(a0, 1);
        let it = SubspaceIterate::from_vector(Vector::from_vec(vec![0.6, 0.8]), 1.0);
        assert!(matches!(jacobian_diagnostics(&problem, &it), Err(NepvError::NotASolution(_))));
    }
}
