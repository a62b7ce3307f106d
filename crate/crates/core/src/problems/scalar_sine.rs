use super::nonzero_norm_sq;
use crate::nepv::{NepvProblem, SplitProblem};
use crate::{Mat, Result, Vector};

#[rustfmt::skip]
const A0: [f64; 16] = [
    10.0, 21.0, 13.0, 16.0,
    21.0, -26.0, 24.0, 2.0,
    13.0, 24.0, -26.0, 37.0,
    16.0, 2.0, 37.0, -4.0,
];

#[rustfmt::skip]
const A1: [f64; 16] = [
    20.0, 28.0, 12.0, 32.0,
    28.0, 4.0, 14.0, 6.0,
    12.0, 14.0, 32.0, 34.0,
    32.0, 6.0, 34.0, 16.0,
];

#[rustfmt::skip]
const A2: [f64; 16] = [
    -14.0, 16.0, -4.0, 15.0,
    16.0, 10.0, 15.0, -9.0,
    -4.0, 15.0, 16.0, 6.0,
    15.0, -9.0, 6.0, -6.0,
];

fn tenths(entries: &[f64; 16]) -> Mat {
    Mat::from_row_slice(4, 4, entries) / 10.0
}

/// `A(v) = A₀ + α sin(vᵀA₂v / vᵀv) A₁` on `ℝ⁴`.
#[derive(Debug, Clone)]
pub struct ScalarSineProblem {
    pub a0: Mat,
    pub a1: Mat,
    pub a2: Mat,
    pub alpha: f64,
}

impl ScalarSineProblem {
    pub fn new(alpha: f64) -> Self {
        Self {
            a0: tenths(&A0),
            a1: tenths(&A1),
            a2: tenths(&A2),
            alpha,
        }
    }

    fn quotient(&self, v: &Vector) -> Result<(f64, f64)> {
        let vv = nonzero_norm_sq(v)?;
        let vav = v.dot(&(&self.a2 * v));
        Ok((vav, vv))
    }
}

impl NepvProblem for ScalarSineProblem {
    fn name(&self) -> &'static str {
        "scalar_sine"
    }

    fn dim(&self) -> usize {
        4
    }

    fn block_size(&self) -> usize {
        1
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn matrix(&self, v: &Mat) -> Result<Mat> {
        Ok(&self.a0 + self.nonlinear_part(v)? * self.alpha)
    }

    fn jacobian(&self, v: &Vector) -> Result<Mat> {
        let (vav, vv) = self.quotient(v)?;
        let q = vav / vv;
        let a = &self.a0 + &self.a1 * (self.alpha * q.sin());
        let a1v = &self.a1 * v;
        let row = (&self.a2 * v).transpose() * vv - v.transpose() * vav;
        let scale = 2.0 * self.alpha * q.cos() / (vv * vv);
        Ok(a + a1v * row * scale)
    }
}

impl SplitProblem for ScalarSineProblem {
    fn linear_part(&self) -> &Mat {
        &self.a0
    }

    fn nonlinear_part(&self, v: &Mat) -> Result<Mat> {
        let (vav, vv) = self.quotient(&v.column(0).into_owned())?;
        Ok(&self.a1 * (vav / vv).sin())
    }
}
