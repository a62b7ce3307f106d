//! Derivative-free Nelder–Mead minimization with dimension-adaptive
//! coefficients (Gao and Han).

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Stop when every vertex is within `xatol` of the best one (max norm)
    /// and every value is within `fatol` of the best value.
    pub xatol: f64,
    pub fatol: f64,
    /// Offset used for zero coordinates of the starting point.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evals: 5000,
            xatol: 1e-14,
            fatol: 1e-30,
            initial_step: 2.5e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub start_value: f64,
    pub evaluations: usize,
}

pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let dim = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let start_value = eval(x0, &mut evals);
    if dim == 0 {
        return SimplexResult {
            x: Vec::new(),
            value: start_value,
            start_value,
            evaluations: evals,
        };
    }
    let d = dim as f64;
    let rho = 1.0;
    let chi = 1.0 + 2.0 / d;
    let psi = 0.75 - 1.0 / (2.0 * d);
    let sigma = 1.0 - 1.0 / d;

    let mut sim: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    let mut fsim: Vec<f64> = Vec::with_capacity(dim + 1);
    sim.push(x0.to_vec());
    fsim.push(start_value);
    for k in 0..dim {
        let mut y = x0.to_vec();
        y[k] = if y[k] != 0.0 { 1.05 * y[k] } else { opts.initial_step };
        fsim.push(eval(&y, &mut evals));
        sim.push(y);
    }
    sort_simplex(&mut sim, &mut fsim);

    let combine = |a: &[f64], wa: f64, b: &[f64], wb: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
    };

    while evals < opts.max_evals {
        let xspread = sim[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&sim[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let fspread = fsim[1..].iter().map(|v| (v - fsim[0]).abs()).fold(0.0, f64::max);
        if xspread <= opts.xatol && fspread <= opts.fatol {
            break;
        }

        let mut xbar = vec![0.0; dim];
        for v in &sim[..dim] {
            for (s, x) in xbar.iter_mut().zip(v) {
                *s += x / d;
            }
        }
        let worst = sim[dim].clone();
        let xr = combine(&xbar, 1.0 + rho, &worst, -rho);
        let fxr = eval(&xr, &mut evals);
        let mut shrink = false;
        if fxr < fsim[0] {
            let xe = combine(&xbar, 1.0 + rho * chi, &worst, -rho * chi);
            let fxe = eval(&xe, &mut evals);
            if fxe < fxr {
                sim[dim] = xe;
                fsim[dim] = fxe;
            } else {
                sim[dim] = xr;
                fsim[dim] = fxr;
            }
        } else if fxr < fsim[dim - 1] {
            sim[dim] = xr;
            fsim[dim] = fxr;
        } else if fxr < fsim[dim] {
            let xc = combine(&xbar, 1.0 + psi * rho, &worst, -psi * rho);
            let fxc = eval(&xc, &mut evals);
            if fxc <= fxr {
                sim[dim] = xc;
                fsim[dim] = fxc;
            } else {
                shrink = true;
            }
        } else {
            let xcc = combine(&xbar, 1.0 - psi, &worst, psi);
            let fxcc = eval(&xcc, &mut evals);
            if fxcc < fsim[dim] {
                sim[dim] = xcc;
                fsim[dim] = fxcc;
            } else {
                shrink = true;
            }
        }
        if shrink {
            let best = sim[0].clone();
            for j in 1..=dim {
                sim[j] = combine(&best, 1.0 - sigma, &sim[j], sigma);
                fsim[j] = eval(&sim[j], &mut evals);
            }
        }
        sort_simplex(&mut sim, &mut fsim);
    }

    SimplexResult {
        x: sim.swap_remove(0),
        value: fsim[0],
        start_value,
        evaluations: evals,
    }
}

fn sort_simplex(sim: &mut Vec<Vec<f64>>, fsim: &mut Vec<f64>) {
    let mut order: Vec<usize> = (0..fsim.len()).collect();
    order.sort_by(|&a, &b| fsim[a].total_cmp(&fsim[b]).then(a.cmp(&b)));
    let new_sim: Vec<Vec<f64>> = order.iter().map(|&i| sim[i].clone()).collect();
    let new_f: Vec<f64> = order.iter().map(|&i| fsim[i]).collect();
    *sim = new_sim;
    *fsim = new_f;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2);
        let opts = SimplexOptions {
            initial_step: 0.5,
            xatol: 1e-10,
            fatol: 1e-20,
            ..Default::default()
        };
        let r = minimize(f, &[0.0, 0.0], &opts);
        assert!((r.x[0] - 1.0).abs() < 1e-8);
        assert!((r.x[1] + 2.0).abs() < 1e-8);
        assert!(r.value < r.start_value);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let opts = SimplexOptions {
            initial_step: 0.1,
            ..Default::default()
        };
        let r = minimize(f, &[-1.2, 1.0], &opts);
        assert!(r.value < 1e-12, "value {}", r.value);
    }

    #[test]
    fn budget_is_respected() {
        let opts = SimplexOptions {
            max_evals: 50,
            ..Default::default()
        };
        let r = minimize(|x: &[f64]| x.iter().map(|v| v * v).sum(), &[1.0; 6], &opts);
        // one shrink may overrun by at most `dim` evaluations
        assert!(r.evaluations <= 50 + 7);
    }

    #[test]
    fn nan_treated_as_infinite() {
        let f = |x: &[f64]| if x[0] > 0.5 { f64::NAN } else { (x[0] - 0.4).powi(2) };
        let opts = SimplexOptions {
            initial_step: 0.1,
            ..Default::default()
        };
        let r = minimize(f, &[0.0], &opts);
        assert!((r.x[0] - 0.4).abs() < 1e-6);
    }
}
