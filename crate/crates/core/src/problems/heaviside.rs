use crate::kernel::{self, heaviside_psd, kron, projector_frechet, shuffle_matrix, vectorize};
use crate::nepv::{NepvProblem, SplitProblem};
use crate::{Mat, NepvError, Result, Vector};

/// `A(V) = A₀ + α Diag(A₀⁻¹ diag(h(VVᵀ)))` with `A₀ = tridiag(−1, 2, −1)`.
///
/// Depends on `V` only through the projector onto `range(V)`.
#[derive(Debug, Clone)]
pub struct HeavisideTraceProblem {
    n: usize,
    p: usize,
    alpha: f64,
    a0: Mat,
    a0_inv: Mat,
}

impl HeavisideTraceProblem {
    pub fn new(n: usize, p: usize, alpha: f64) -> Result<Self> {
        if n < 2 || p == 0 || p > n {
            return Err(NepvError::InvalidArgument(format!(
                "heaviside problem needs 1 <= p <= n and n >= 2, got n={n}, p={p}"
            )));
        }
        let mut a0 = Mat::zeros(n, n);
        for i in 0..n {
            a0[(i, i)] = 2.0;
            if i + 1 < n {
                a0[(i, i + 1)] = -1.0;
                a0[(i + 1, i)] = -1.0;
            }
        }
        let a0_inv = a0
            .clone()
            .lu()
            .try_inverse()
            .ok_or(NepvError::Singular(0.0))?;
        Ok(Self {
            n,
            p,
            alpha,
            a0,
            a0_inv,
        })
    }

    /// `A₀⁻¹`; column `i` is `diag(A_i)` in the expansion
    /// `A(V) = A₀ + α Σᵢ (h(VVᵀ))ᵢᵢ A_i`.
    pub fn a0_inverse(&self) -> &Mat {
        &self.a0_inv
    }

    /// `h(VVᵀ)`, failing when `V` is rank deficient.
    fn projector(&self, v: &Mat) -> Result<Mat> {
        let proj = heaviside_psd(&(v * v.transpose()))?;
        let rank = proj.trace().round() as usize;
        if rank != self.p {
            let sv = v.singular_values();
            return Err(NepvError::RankDeficient {
                smallest: sv.min(),
                norm: sv.max(),
            });
        }
        Ok(proj)
    }

    fn shift(&self, d: &Vector) -> Mat {
        Mat::from_diagonal(&(&self.a0_inv * d))
    }

    /// The same Jacobian assembled term by term: with `P_{n²}` the shuffle
    /// matrix and `𝓛ᵢ` the row vector `E ↦ eᵢᵀ L_g(VVᵀ, E) eᵢ` over the
    /// canonical basis of `ℝ^{n×n}`,
    ///
    /// `J = I_p ⊗ A(V) + α (Σᵢ vec(A_i V) 𝓛ᵢ)(I + P_{n²})(V ⊗ I_n)`.
    ///
    /// Requires orthonormal `V`. Cost is `O(n⁵)`; intended for validation.
    pub fn jacobian_literal(&self, v: &Vector) -> Result<Mat> {
        let (n, p) = (self.n, self.p);
        let vm = kernel::unvectorize(v.as_slice(), n, p)?;
        let defect = kernel::orth_defect(&vm);
        if defect > 1e-8 {
            return Err(NepvError::NotOrthonormal(defect));
        }
        let a = self.matrix(&vm)?;
        let mut sum = Mat::zeros(n * p, n * n);
        for i in 0..n {
            let ai_v = Mat::from_diagonal(&self.a0_inv.column(i)) * &vm;
            let mut row = Mat::zeros(1, n * n);
            for l in 0..n {
                for j in 0..n {
                    let mut e = Mat::zeros(n, n);
                    e[(j, l)] = 1.0;
                    row[(0, j + n * l)] = projector_frechet(&vm, &e)[(i, i)];
                }
            }
            sum += vectorize(&ai_v) * row;
        }
        let sym = Mat::identity(n * n, n * n) + shuffle_matrix(n);
        let lift = kron(&vm, &Mat::identity(n, n));
        Ok(kron(&Mat::identity(p, p), &a) + sum * sym * lift * self.alpha)
    }
}

impl NepvProblem for HeavisideTraceProblem {
    fn name(&self) -> &'static str {
        "heaviside"
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn block_size(&self) -> usize {
        self.p
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn matrix(&self, v: &Mat) -> Result<Mat> {
        Ok(&self.a0 + self.nonlinear_part(v)? * self.alpha)
    }

    /// Column `(k, c)` is the derivative in direction `E_{k,c}`:
    /// `vec(A(V) E) + α vec(Diag(A₀⁻¹ d′) V)` where
    /// `d′ᵢ = 2 (I − P)ᵢₖ (V⁺)꜀ᵢ` is the diagonal of the projector derivative.
    /// For orthonormal `V`, `V⁺ = Vᵀ`.
    fn jacobian(&self, v: &Vector) -> Result<Mat> {
        let (n, p) = (self.n, self.p);
        let vm = kernel::unvectorize(v.as_slice(), n, p)?;
        let proj = self.projector(&vm)?;
        let a = &self.a0 + self.shift(&proj.diagonal()) * self.alpha;
        let gram = vm.transpose() * &vm;
        let pinv = gram
            .cholesky()
            .ok_or(NepvError::RankDeficient {
                smallest: 0.0,
                norm: vm.norm(),
            })?
            .solve(&vm.transpose());
        let comp = Mat::identity(n, n) - &proj;
        let mut jac = kron(&Mat::identity(p, p), &a);
        if self.alpha == 0.0 {
            return Ok(jac);
        }
        for c in 0..p {
            for k in 0..n {
                let d: Vector = Vector::from_fn(n, |i, _| 2.0 * comp[(i, k)] * pinv[(c, i)]);
                let w = &self.a0_inv * d;
                let col = k + n * c;
                for cc in 0..p {
                    for i in 0..n {
                        jac[(i + n * cc, col)] += self.alpha * w[i] * vm[(i, cc)];
                    }
                }
            }
        }
        Ok(jac)
    }
}

impl SplitProblem for HeavisideTraceProblem {
    fn linear_part(&self) -> &Mat {
        &self.a0
    }

    fn nonlinear_part(&self, v: &Mat) -> Result<Mat> {
        if v.shape() != (self.n, self.p) {
            return Err(NepvError::DimensionMismatch(format!(
                "V must be {}x{}, got {}x{}",
                self.n,
                self.p,
                v.nrows(),
                v.ncols()
            )));
        }
        let proj = self.projector(v)?;
        Ok(self.shift(&proj.diagonal()))
    }
}
