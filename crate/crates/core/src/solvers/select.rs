use super::config::{SelectionKind, SelectionStrategy, Target};
use crate::kernel::{lstsq, RealEigen, SymEigDecomposition};
use crate::{Mat, NepvError, Result, Vector};

/// An eigendecomposition to select from. For a general matrix only its real
/// eigenpairs are candidates.
#[derive(Debug, Clone, Copy)]
pub enum Spectrum<'a> {
    Symmetric(&'a SymEigDecomposition),
    General(&'a RealEigen),
}

/// Selected eigenvectors `Y` (`n × p`, unit columns) and their eigenvalues.
#[derive(Debug, Clone)]
pub struct Selection {
    pub y: Mat,
    pub eigenvalues: Vec<f64>,
}

struct Candidate {
    value: f64,
    key: usize,
}

impl Spectrum<'_> {
    /// Admissible eigenvalues in ascending order, ties by position.
    fn candidates(&self) -> Vec<Candidate> {
        let mut c: Vec<Candidate> = match self {
            Spectrum::Symmetric(d) => (0..d.dim())
                .map(|i| Candidate {
                    value: d.eigenvalues[i],
                    key: i,
                })
                .collect(),
            Spectrum::General(e) => e
                .real_positions()
                .into_iter()
                .map(|i| Candidate {
                    value: e.eigenvalues()[i].re,
                    key: i,
                })
                .collect(),
        };
        c.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.key.cmp(&b.key)));
        c
    }

    fn vector(&self, key: usize) -> Result<Vector> {
        match self {
            Spectrum::Symmetric(d) => Ok(d.eigenvectors.column(key).into_owned()),
            Spectrum::General(e) => e.eigenvector(key),
        }
    }

    fn dim(&self) -> usize {
        match self {
            Spectrum::Symmetric(d) => d.dim(),
            Spectrum::General(e) => e.dim(),
        }
    }
}

/// Mean column Rayleigh quotient of `previous` with respect to `matrix`.
pub fn rayleigh_target(matrix: &Mat, previous: &Mat) -> Result<f64> {
    let mut sum = 0.0;
    for col in previous.column_iter() {
        let nn = col.norm_squared();
        if nn == 0.0 {
            return Err(NepvError::ZeroVector);
        }
        sum += col.dot(&(matrix * col)) / nn;
    }
    Ok(sum / previous.ncols() as f64)
}

/// Picks `p = previous.ncols()` eigenpairs from `spectrum` and fixes each
/// column's sign by its overlap with the matching column of `previous`.
/// `matrix` is the decomposed matrix; it is only used for the Rayleigh
/// quotient target.
pub fn select_eigenpairs(
    spectrum: Spectrum<'_>,
    strategy: &SelectionStrategy,
    previous: &Mat,
    matrix: &Mat,
) -> Result<Selection> {
    strategy.validate()?;
    let p = previous.ncols();
    if previous.nrows() != spectrum.dim() {
        return Err(NepvError::DimensionMismatch(format!(
            "previous iterate has {} rows, spectrum has dimension {}",
            previous.nrows(),
            spectrum.dim()
        )));
    }
    let cands = spectrum.candidates();
    if cands.is_empty() {
        return Err(NepvError::SelectionFailed("no real eigenpair available".into()));
    }
    let target = || -> Result<f64> {
        Ok(match strategy.target {
            Target::Value(t) => t,
            Target::RayleighQuotient => rayleigh_target(matrix, previous)?,
            Target::Smallest => cands[0].value,
        })
    };

    let mut selection = match strategy.kind {
        SelectionKind::SmallestP => {
            if cands.len() < p {
                return Err(too_few(cands.len(), p));
            }
            gather(&spectrum, &cands[..p])?
        }
        SelectionKind::NearestTarget => {
            if cands.len() < p {
                return Err(too_few(cands.len(), p));
            }
            let t = target()?;
            let mut order: Vec<usize> = (0..cands.len()).collect();
            order.sort_by(|&a, &b| {
                (cands[a].value - t)
                    .abs()
                    .total_cmp(&(cands[b].value - t).abs())
                    .then(a.cmp(&b))
            });
            let mut chosen: Vec<usize> = order[..p].to_vec();
            chosen.sort_unstable();
            let picked: Vec<&Candidate> = chosen.iter().map(|&i| &cands[i]).collect();
            gather_refs(&spectrum, &picked)?
        }
        SelectionKind::ClusterLstsq => {
            if p != 1 {
                return Err(NepvError::InvalidArgument(format!(
                    "cluster_lstsq selects a single vector, got block size {p}"
                )));
            }
            let t = target()?;
            let members: Vec<&Candidate> =
                cands.iter().filter(|c| (c.value - t).abs() <= strategy.delta).collect();
            if members.is_empty() {
                return Err(NepvError::SelectionFailed(format!(
                    "no eigenvalue within {} of target {t}",
                    strategy.delta
                )));
            }
            let basis = gather_refs(&spectrum, &members)?;
            let prev = previous.column(0).into_owned();
            let coeffs = lstsq(&basis.y, &prev);
            let fitted = &basis.y * &coeffs;
            let norm = fitted.norm();
            if !(norm > 1e-8 * prev.norm()) {
                return Err(NepvError::SelectionFailed(format!(
                    "previous iterate is orthogonal to the {}-dimensional cluster around {t}",
                    members.len()
                )));
            }
            let weights: f64 = coeffs.iter().map(|c| c * c).sum();
            let value = coeffs
                .iter()
                .zip(&basis.eigenvalues)
                .map(|(c, l)| c * c * l)
                .sum::<f64>()
                / weights;
            Selection {
                y: Mat::from_column_slice(fitted.len(), 1, (fitted / norm).as_slice()),
                eigenvalues: vec![value],
            }
        }
    };

    for (j, mut col) in selection.y.column_iter_mut().enumerate() {
        if col.dot(&previous.column(j)) < 0.0 {
            col.neg_mut();
        }
    }
    Ok(selection)
}

fn too_few(found: usize, p: usize) -> NepvError {
    NepvError::SelectionFailed(format!("{found} admissible eigenpairs, need {p}"))
}

fn gather(spectrum: &Spectrum<'_>, picked: &[Candidate]) -> Result<Selection> {
    let refs: Vec<&Candidate> = picked.iter().collect();
    gather_refs(spectrum, &refs)
}

fn gather_refs(spectrum: &Spectrum<'_>, picked: &[&Candidate]) -> Result<Selection> {
    let cols = picked
        .iter()
        .map(|c| spectrum.vector(c.key))
        .collect::<Result<Vec<_>>>()?;
    Ok(Selection {
        y: Mat::from_columns(&cols),
        eigenvalues: picked.iter().map(|c| c.value).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{real_eigen, sym_eig};
    use crate::rng;

    fn diag(values: &[f64]) -> Mat {
        Mat::from_diagonal(&Vector::from_column_slice(values))
    }

    #[test]
    fn smallest_p_on_diagonal() {
        let m = diag(&[3.0, 1.0, 2.0]);
        let eig = sym_eig(&m).unwrap();
        let prev = Mat::identity(3, 2);
        let s = select_eigenpairs(Spectrum::Symmetric(&eig), &SelectionStrategy::smallest_p(), &prev, &m)
            .unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0]);
    }

    #[test]
    fn nearest_target_on_diagonal() {
        let m = diag(&[1.0, 2.0, 3.0]);
        let eig = sym_eig(&m).unwrap();
        let prev = Mat::from_column_slice(3, 1, &[1.0, 1.0, 1.0]);
        let strat = SelectionStrategy::nearest(Target::Value(2.9));
        let s = select_eigenpairs(Spectrum::Symmetric(&eig), &strat, &prev, &m).unwrap();
        assert_eq!(s.eigenvalues, vec![3.0]);
        assert!(s.y[(2, 0)] > 0.0);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let m = diag(&[1.0, 3.0]);
        let eig = sym_eig(&m).unwrap();
        let prev = Mat::from_column_slice(2, 1, &[1.0, 1.0]);
        let strat = SelectionStrategy::nearest(Target::Value(2.0));
        let s = select_eigenpairs(Spectrum::Symmetric(&eig), &strat, &prev, &m).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0]);
    }

    #[test]
    fn rayleigh_target_follows_previous() {
        let m = diag(&[1.0, 2.0, 3.0]);
        let eig = sym_eig(&m).unwrap();
        let prev = Mat::from_column_slice(3, 1, &[0.1, 1.0, 0.1]);
        let strat = SelectionStrategy::nearest(Target::RayleighQuotient);
        let s = select_eigenpairs(Spectrum::Symmetric(&eig), &strat, &prev, &m).unwrap();
        assert_eq!(s.eigenvalues, vec![2.0]);
    }

    #[test]
    fn cluster_fit_matches_projection() {
        let mut r = rng::seeded(11);
        let q = rng::orthonormal_matrix(&mut r, 6, 6);
        let lambdas = [1.0, 1.05, 3.0, 4.0, 5.0, 6.0];
        let m = &q * diag(&lambdas) * q.transpose();
        let eig = sym_eig(&m).unwrap();
        let prev = q.column(0) * 0.6 + q.column(1) * 0.7 + q.column(4) * 0.3;
        let prev = Mat::from_column_slice(6, 1, prev.as_slice());
        let strat = SelectionStrategy::cluster(Target::Value(1.0), 0.1).unwrap();
        let s = select_eigenpairs(Spectrum::Symmetric(&eig), &strat, &prev, &m).unwrap();
        let span = q.columns(0, 2);
        let proj = span * (span.transpose() * prev.column(0));
        let overlap = s.y.column(0).dot(&proj) / proj.norm();
        assert!(overlap >= 0.999);
        assert!(s.eigenvalues[0] > 1.0 && s.eigenvalues[0] < 1.05);
    }

    #[test]
    fn cluster_failures() {
        let m = diag(&[1.0, 2.0, 3.0]);
        let eig = sym_eig(&m).unwrap();
        let prev = Mat::from_column_slice(3, 1, &[0.0, 0.0, 1.0]);
        let far = SelectionStrategy::cluster(Target::Value(10.0), 0.5).unwrap();
        assert!(matches!(
            select_eigenpairs(Spectrum::Symmetric(&eig), &far, &prev, &m),
            Err(NepvError::SelectionFailed(_))
        ));
        let orth = SelectionStrategy::cluster(Target::Value(1.0), 0.5).unwrap();
        assert!(matches!(
            select_eigenpairs(Spectrum::Symmetric(&eig), &orth, &prev, &m),
            Err(NepvError::SelectionFailed(_))
        ));
    }

    #[test]
    fn general_spectrum_skips_complex_pairs() {
        let m = Mat::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 5.0]);
        let e = real_eigen(&m).unwrap();
        let prev = Mat::from_column_slice(3, 1, &[1.0, 0.0, -1.0]);
        let s = select_eigenpairs(Spectrum::General(&e), &SelectionStrategy::smallest_p(), &prev, &m).unwrap();
        assert!((s.eigenvalues[0] - 5.0).abs() < 1e-14);
        assert!((s.y[(2, 0)] + 1.0).abs() < 1e-12);
        let prev2 = Mat::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(matches!(
            select_eigenpairs(Spectrum::General(&e), &SelectionStrategy::smallest_p(), &prev2, &m),
            Err(NepvError::SelectionFailed(_))
        ));
    }

    #[test]
    fn deterministic() {
        let mut r = rng::seeded(3);
        let m = rng::symmetric_matrix(&mut r, 7);
        let eig = sym_eig(&m).unwrap();
        let prev = rng::orthonormal_matrix(&mut r, 7, 2);
        let strat = SelectionStrategy::nearest(Target::RayleighQuotient);
        let a = select_eigenpairs(Spectrum::Symmetric(&eig), &strat, &prev, &m).unwrap();
        let b = select_eigenpairs(Spectrum::Symmetric(&eig), &strat, &prev, &m).unwrap();
        assert_eq!(a.y, b.y);
        assert_eq!(a.eigenvalues, b.eigenvalues);
    }
}
