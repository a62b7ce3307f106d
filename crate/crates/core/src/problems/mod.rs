//! Concrete problem families.

mod gpe;
mod heaviside;
mod linear;
mod scalar_sine;

pub use gpe::{load_potential_csv, parse_potential_csv, GpeParams, GpeProblem, Potential};
pub use heaviside::HeavisideTraceProblem;
pub use linear::LinearProblem;
pub use scalar_sine::ScalarSineProblem;

use crate::{NepvError, Result, Vector};

pub(crate) fn nonzero_norm_sq(v: &Vector) -> Result<f64> {
    let nn = v.norm_squared();
    if nn == 0.0 {
        return Err(NepvError::ZeroVector);
    }
    if !nn.is_finite() {
        return Err(NepvError::NonFinite);
    }
    Ok(nn)
}
