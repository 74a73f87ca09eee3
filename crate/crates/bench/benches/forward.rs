use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64 as C;
use transeig::forward::{find_eigenvalues, Dispersion, SearchWindow, WaveDispersion};
use transeig::profiles::ExampleName;
use transeig::IntegratorConfig;
use transeig_bench::profile;

fn dispersion(c: &mut Criterion) {
    let w = WaveDispersion::new(&profile(ExampleName::Ex63), IntegratorConfig::default());
    c.bench_function("D(k) ex63 k=10", |b| b.iter(|| w.eval(black_box(C::new(10.0, 0.0))).unwrap()));
    c.bench_function("D(k) ex63 k=100", |b| b.iter(|| w.eval(black_box(C::new(100.0, 0.0))).unwrap()));
}

fn eigenvalues(c: &mut Criterion) {
    let w = WaveDispersion::new(&profile(ExampleName::Ex62Second), IntegratorConfig::default());
    let mut g = c.benchmark_group("eigenvalues");
    g.sample_size(10);
    g.bench_function("ex62_second |Re k| <= 20", |b| {
        b.iter(|| find_eigenvalues(&w, SearchWindow { k_max: 20.0, im_band: 4.0 }).unwrap())
    });
    g.finish();
}

criterion_group!(benches, dispersion, eigenvalues);
criterion_main!(benches);
