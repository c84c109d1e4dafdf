use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use riemflow::geometry::{FrameVector, Point};
use riemflow::lagrangian::{ftle, tangent_at, Steady};
use riemflow::spectral_bounds::{coeffs_by_fft, coeffs_by_series, CoeffTarget};
use riemflow::sphere_flows::Quadrupole;
use riemflow::torus::{initial_condition, TorusParams, TorusSolver};
use riemflow::{classify_steady, ClassifyOptions};

fn pointwise(c: &mut Criterion) {
    let p = Point::new(0.7, 0.4);
    let opts = ClassifyOptions::default();
    c.bench_function("classify_steady/quadrupole", |b| b.iter(|| classify_steady(&Quadrupole, black_box(p), &opts)));
    c.bench_function("ftle/quadrupole T=2 dt=1e-3", |b| b.iter(|| ftle(&Quadrupole, black_box(p), 2.0, 1e-3)));
    c.bench_function("tangent_at/quadrupole T=1 dt=1e-2", |b| {
        b.iter(|| tangent_at(&Steady(&Quadrupole), black_box(p), FrameVector::new(1.0, 0.0), 0.0, 1.0, 1e-2))
    });
}

fn torus(c: &mut Criterion) {
    let mut g = c.benchmark_group("torus");
    g.sample_size(10);
    for (nx, k) in [(128, 41), (256, 85)] {
        let mut s = TorusSolver::new(TorusParams { nx, ny: nx, k_max: k, ..TorusParams::desk() }).unwrap();
        let st = initial_condition(&mut s).unwrap();
        g.bench_function(format!("rhs/{nx}"), |b| b.iter(|| s.rhs(black_box(&st))));
        g.bench_function(format!("step_rk4/{nx}"), |b| b.iter(|| s.step_rk4(black_box(&st)).unwrap()));
    }
    g.finish();
}

fn tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("coefficients");
    g.sample_size(10);
    g.bench_function("series K=40", |b| b.iter(|| coeffs_by_series(black_box(1.8), 40, 200).unwrap()));
    g.bench_function("fft K=40 N=160", |b| b.iter(|| coeffs_by_fft(black_box(1.8), 40, 160, CoeffTarget::Metric).unwrap()));
    g.finish();
}

criterion_group!(benches, pointwise, torus, tables);
criterion_main!(benches);
