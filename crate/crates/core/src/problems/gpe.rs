use std::path::Path;

use super::nonzero_norm_sq;
use crate::nepv::{NepvProblem, SplitProblem};
use crate::{Mat, NepvError, Result, Vector};

/// Trap potential sampled on the interior grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `V(x, y) = ½(x² + y²)`.
    Harmonic,
    Zero,
    /// `N × N` samples; row index is `y`, column index is `x`.
    Grid(Mat),
}

impl Potential {
    fn sample(&self, n: usize, i: usize, j: usize, x: f64, y: f64) -> f64 {
        match self {
            Potential::Harmonic => 0.5 * (x * x + y * y),
            Potential::Zero => 0.0,
            Potential::Grid(g) => {
                debug_assert_eq!(g.shape(), (n, n));
                g[(j, i)]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpeParams {
    /// Interior grid points per dimension.
    pub n: usize,
    /// Half-width of the square domain `[−L, L]²`.
    pub l: f64,
    pub omega: f64,
    pub b: f64,
    pub potential: Potential,
}

impl Default for GpeParams {
    fn default() -> Self {
        Self {
            n: 40,
            l: 10.0,
            omega: 0.5,
            b: 0.0,
            potential: Potential::Harmonic,
        }
    }
}

/// Realified finite-difference Gross–Pitaevskii operator on `2N²` unknowns
/// `v = [Re ψ; Im ψ]`:
///
/// `A(v) = A₀ + γ/(vᵀv) B(v)`, `B(v) = blockdiag(D, D)`,
/// `D = diag(v₁² + v₂²)`, `γ = b/Δx²`.
#[derive(Debug, Clone)]
pub struct GpeProblem {
    params: GpeParams,
    dx: f64,
    gamma: f64,
    a0_real: Mat,
}

impl GpeProblem {
    pub fn build(params: GpeParams) -> Result<Self> {
        let n = params.n;
        if n < 3 {
            return Err(NepvError::InvalidArgument(format!("gpe grid size N must be >= 3, got {n}")));
        }
        if !(params.l > 0.0 && params.l.is_finite()) {
            return Err(NepvError::InvalidArgument(format!(
                "gpe half-width L must be positive, got {}",
                params.l
            )));
        }
        if let Potential::Grid(g) = &params.potential {
            if g.shape() != (n, n) {
                return Err(NepvError::DimensionMismatch(format!(
                    "potential grid is {}x{}, expected {n}x{n}",
                    g.nrows(),
                    g.ncols()
                )));
            }
        }
        let dx = 2.0 * params.l / (n as f64 + 1.0);
        let coord = |i: usize| -params.l + (i as f64 + 1.0) * dx;
        let m = n * n;
        let mut re = Mat::zeros(m, m);
        let mut im = Mat::zeros(m, m);
        let lap_diag = 2.0 / (dx * dx);
        let lap_off = -0.5 / (dx * dx);
        let d1 = 1.0 / (2.0 * dx);
        for j in 0..n {
            for i in 0..n {
                let k = i + n * j;
                let (x, y) = (coord(i), coord(j));
                re[(k, k)] = lap_diag + params.potential.sample(n, i, j, x, y);
                // −Ω (y ∂x − x ∂y)
                if i + 1 < n {
                    re[(k, k + 1)] = lap_off;
                    im[(k, k + 1)] -= params.omega * y * d1;
                }
                if i > 0 {
                    re[(k, k - 1)] = lap_off;
                    im[(k, k - 1)] += params.omega * y * d1;
                }
                if j + 1 < n {
                    re[(k, k + n)] = lap_off;
                    im[(k, k + n)] += params.omega * x * d1;
                }
                if j > 0 {
                    re[(k, k - n)] = lap_off;
                    im[(k, k - n)] -= params.omega * x * d1;
                }
            }
        }
        let mut a0_real = Mat::zeros(2 * m, 2 * m);
        a0_real.view_mut((0, 0), (m, m)).copy_from(&re);
        a0_real.view_mut((m, m), (m, m)).copy_from(&re);
        a0_real.view_mut((0, m), (m, m)).copy_from(&(-&im));
        a0_real.view_mut((m, 0), (m, m)).copy_from(&im);
        let gamma = params.b / (dx * dx);
        Ok(Self {
            params,
            dx,
            gamma,
            a0_real,
        })
    }

    pub fn params(&self) -> &GpeParams {
        &self.params
    }

    pub fn grid_size(&self) -> usize {
        self.params.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn a0_real(&self) -> &Mat {
        &self.a0_real
    }

    /// `v₁² + v₂²` per grid point.
    fn density(&self, v: &[f64]) -> Vec<f64> {
        let m = self.params.n * self.params.n;
        (0..m).map(|k| v[k] * v[k] + v[k + m] * v[k + m]).collect()
    }
}

impl NepvProblem for GpeProblem {
    fn name(&self) -> &'static str {
        "gpe"
    }

    fn dim(&self) -> usize {
        2 * self.params.n * self.params.n
    }

    fn block_size(&self) -> usize {
        1
    }

    fn alpha(&self) -> f64 {
        self.params.b
    }

    fn matrix(&self, v: &Mat) -> Result<Mat> {
        let col = v.column(0).into_owned();
        let vv = nonzero_norm_sq(&col)?;
        let mut a = self.a0_real.clone();
        let m = self.params.n * self.params.n;
        let scale = self.gamma / vv;
        for (k, d) in self.density(col.as_slice()).into_iter().enumerate() {
            a[(k, k)] += scale * d;
            a[(k + m, k + m)] += scale * d;
        }
        Ok(a)
    }

    fn jacobian(&self, v: &Vector) -> Result<Mat> {
        let vv = nonzero_norm_sq(v)?;
        let m = self.params.n * self.params.n;
        let mut jac = self.a0_real.clone();
        let scale = self.gamma / vv;
        let mut bv = Vector::zeros(2 * m);
        for k in 0..m {
            let (v1, v2) = (v[k], v[k + m]);
            let d = v1 * v1 + v2 * v2;
            jac[(k, k)] += scale * (3.0 * v1 * v1 + v2 * v2);
            jac[(k + m, k + m)] += scale * (v1 * v1 + 3.0 * v2 * v2);
            jac[(k, k + m)] += scale * 2.0 * v1 * v2;
            jac[(k + m, k)] += scale * 2.0 * v1 * v2;
            bv[k] = d * v1;
            bv[k + m] = d * v2;
        }
        if self.gamma != 0.0 {
            jac.ger(-2.0 * self.gamma / (vv * vv), &bv, v, 1.0);
        }
        Ok(jac)
    }
}

impl SplitProblem for GpeProblem {
    fn linear_part(&self) -> &Mat {
        &self.a0_real
    }

    /// `B(v) / (Δx² vᵀv)`, so that `A = A₀ + b C(v)`.
    fn nonlinear_part(&self, v: &Mat) -> Result<Mat> {
        let col = v.column(0).into_owned();
        let vv = nonzero_norm_sq(&col)?;
        let m = self.params.n * self.params.n;
        let mut c = Mat::zeros(2 * m, 2 * m);
        let scale = 1.0 / (self.dx * self.dx * vv);
        for (k, d) in self.density(col.as_slice()).into_iter().enumerate() {
            c[(k, k)] = scale * d;
            c[(k + m, k + m)] = scale * d;
        }
        Ok(c)
    }
}

/// Parses a potential grid: a header line `# gpe-potential N=<n> L=<l>`
/// followed by `n` comma-separated rows of `n` values (row index `y`).
pub fn parse_potential_csv(text: &str) -> Result<(usize, f64, Mat)> {
    let bad = |msg: String| NepvError::InvalidArgument(format!("potential csv: {msg}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let rest = header
        .trim()
        .strip_prefix("# gpe-potential")
        .ok_or_else(|| bad(format!("missing header, got `{header}`")))?;
    let mut n = None;
    let mut l = None;
    for tok in rest.split_whitespace() {
        match tok.split_once('=') {
            Some(("N", val)) => n = Some(val.parse::<usize>().map_err(|e| bad(format!("N: {e}")))?),
            Some(("L", val)) => l = Some(val.parse::<f64>().map_err(|e| bad(format!("L: {e}")))?),
            _ => return Err(bad(format!("unexpected header token `{tok}`"))),
        }
    }
    let n = n.ok_or_else(|| bad("header lacks N".into()))?;
    let l = l.ok_or_else(|| bad("header lacks L".into()))?;
    let mut grid = Mat::zeros(n, n);
    let mut rows = 0;
    for (j, line) in lines.enumerate() {
        if j >= n {
            return Err(bad(format!("more than {n} rows")));
        }
        let vals: Vec<&str> = line.split(',').map(str::trim).collect();
        if vals.len() != n {
            return Err(bad(format!("row {j} has {} values, expected {n}", vals.len())));
        }
        for (i, s) in vals.iter().enumerate() {
            grid[(j, i)] = s.parse().map_err(|e| bad(format!("row {j} col {i}: {e}")))?;
        }
        rows += 1;
    }
    if rows != n {
        return Err(bad(format!("{rows} rows, expected {n}")));
    }
    Ok((n, l, grid))
}

pub fn load_potential_csv(path: &Path) -> Result<(usize, f64, Mat)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| NepvError::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_potential_csv(&text)
}
