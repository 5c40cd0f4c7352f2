use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::DMatrix;
use num_complex::Complex64;
use statexfer::models::{pst_chain, uniform_chain};
use statexfer::montecarlo::monte_carlo;
use statexfer::svd::jacobi_svd;
use statexfer::{
    eigendecompose, CouplingMode, DisorderSpec, Eigensystem, TimePolicy, WindowPolicy,
};

fn spectral(c: &mut Criterion) {
    let h = uniform_chain(51).unwrap().single_excitation_matrix();
    c.bench_function("eigendecompose n=51", |b| {
        b.iter(|| eigendecompose(&h).unwrap())
    });
    let ends: Vec<usize> = (0..5).chain(46..51).collect();
    c.bench_function("eigensystem 10 rows n=51", |b| {
        b.iter(|| Eigensystem::for_sites(&h, &ends).unwrap())
    });
}

fn svd(c: &mut Criterion) {
    let m = DMatrix::from_fn(5, 5, |r, k| {
        Complex64::new((r as f64 + 1.0).sin() * (k as f64), (r * k) as f64 / 7.0)
    });
    c.bench_function("jacobi svd 5x5", |b| b.iter(|| jacobi_svd(&m)));
}

fn ensemble(c: &mut Criterion) {
    let base = pst_chain(51).unwrap();
    let spec = DisorderSpec::normal(CouplingMode::Additive, 0.05, 0.05, 1);
    let policy = WindowPolicy::symmetric(5, TimePolicy::Ideal);
    c.bench_function("monte carlo 200 samples n=51 window 5", |b| {
        b.iter(|| monte_carlo(&base, &spec, &policy, 200, 0.75).unwrap())
    });
}

criterion_group!(benches, spectral, svd, ensemble);
criterion_main!(benches);
