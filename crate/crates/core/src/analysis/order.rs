use crate::solvers::IterationTrace;
use crate::{NepvError, Result};

/// Errors at or below this value are not used for order fits.
pub const ERROR_FLOOR: f64 = 1e-12;
/// Fewest usable error values for an order estimate.
pub const MIN_POINTS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    pub order: f64,
    /// Record indices `[first, last]` of the errors used.
    pub fit_window: (usize, usize),
    pub r_squared: f64,
}

/// Least-squares line `y ≈ a + b x`; returns `(b, a, r²)`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r2)
}

/// Fits `log e_{k+1}` against `log e_k` over the leading run of errors
/// above [`ERROR_FLOOR`].
pub fn estimate_order_from_errors(errors: &[f64]) -> Result<OrderEstimate> {
    let usable = errors
        .iter()
        .take_while(|e| e.is_finite() && **e > ERROR_FLOOR)
        .count();
    if usable < MIN_POINTS {
        return Err(NepvError::TooFewPoints {
            found: usable,
            needed: MIN_POINTS,
        });
    }
    let logs: Vec<f64> = errors[..usable].iter().map(|e| e.ln()).collect();
    let (order, _, r_squared) = loglog_fit(&logs[..usable - 1], &logs[1..]);
    if !order.is_finite() {
        return Err(NepvError::TooFewPoints {
            found: usable,
            needed: MIN_POINTS,
        });
    }
    Ok(OrderEstimate {
        order,
        fit_window: (0, usable - 1),
        r_squared,
    })
}

/// Order estimate from a trace whose errors have been attached
/// (see [`IterationTrace::attach_reference`]). The initial error counts.
pub fn estimate_order(trace: &IterationTrace) -> Result<OrderEstimate> {
    let errors: Vec<f64> = trace.errors().into_iter().map_while(|e| e).collect();
    estimate_order_from_errors(&errors)
}
