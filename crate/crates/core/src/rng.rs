//! Seeded random inputs.
//!
//! All random draws go through [`XorShiftRng`] seeded with
//! `SeedableRng::seed_from_u64`, so a given seed produces the same initial
//! guesses on every platform.

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
pub use rand_xorshift::XorShiftRng;

use crate::kernel::thin_qr;
use crate::{Mat, Vector};

pub fn seeded(seed: u64) -> XorShiftRng {
    XorShiftRng::seed_from_u64(seed)
}

/// Matrix with independent standard normal entries.
pub fn gaussian_matrix(rng: &mut XorShiftRng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector(rng: &mut XorShiftRng, len: usize) -> Vector {
    Vector::from_fn(len, |_, _| StandardNormal.sample(rng))
}

/// Random `rows × cols` matrix with orthonormal columns (Q factor of a
/// Gaussian matrix).
pub fn orthonormal_matrix(rng: &mut XorShiftRng, rows: usize, cols: usize) -> Mat {
    loop {
        let g = gaussian_matrix(rng, rows, cols);
        if let Ok((q, _)) = thin_qr(&g) {
            return q;
        }
    }
}

pub fn symmetric_matrix(rng: &mut XorShiftRng, n: usize) -> Mat {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.transpose()) * 0.5
}

/// Random nonsingular matrix, well conditioned enough for invariance tests.
pub fn nonsingular_matrix(rng: &mut XorShiftRng, n: usize) -> Mat {
    loop {
        let g = gaussian_matrix(rng, n, n);
        let sv = g.singular_values();
        if sv.min() > 1e-2 * sv.max() {
            return g;
        }
    }
}
