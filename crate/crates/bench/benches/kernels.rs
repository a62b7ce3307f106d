use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nepv_core::kernel::{heaviside_psd, real_eigen, sym_eig, thin_qr};
use nepv_core::rng::{gaussian_matrix, seeded, symmetric_matrix};

fn kernels(c: &mut Criterion) {
    let mut rng = seeded(1);
    let sym = symmetric_matrix(&mut rng, 200);
    let general = gaussian_matrix(&mut rng, 200, 200);
    let tall = gaussian_matrix(&mut rng, 200, 8);
    c.bench_function("sym_eig_200", |b| b.iter(|| sym_eig(black_box(&sym))));
    c.bench_function("real_eigen_200", |b| b.iter(|| real_eigen(black_box(&general))));
    c.bench_function("thin_qr_200x8", |b| b.iter(|| thin_qr(black_box(&tall))));
    c.bench_function("heaviside_psd_200", |b| b.iter(|| heaviside_psd(black_box(&sym))));
}

criterion_group!(benches, kernels);
criterion_main!(benches);
