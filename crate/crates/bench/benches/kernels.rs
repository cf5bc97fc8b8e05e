use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use camel_lab_core::camel::min_enclosing_ball;
use camel_lab_core::integrators::{midpoint_step_generic, strang_step, GenericHamiltonianSystem};
use camel_lab_core::nonlinearity::grad_h;
use camel_lab_core::phase_space::{min_grid_size, to_grid};
use camel_lab_core::{NonlinearitySpec, PhaseVector};

/// Deterministic smooth state with decaying coefficients.
fn state(n: usize) -> PhaseVector {
    let len = 2 * n + 1;
    let coeff = |i: usize, phase: f64| (i as f64 * 0.7 + phase).sin() / (1.0 + (i as f64 - n as f64).abs());
    PhaseVector::new(
        n,
        (0..len).map(|i| coeff(i, 0.0)).collect(),
        (0..len).map(|i| coeff(i, 1.3)).collect(),
    )
    .unwrap()
}

fn spectral(c: &mut Criterion) {
    let spec = NonlinearitySpec::sine_gordon();
    let mut group = c.benchmark_group("spectral");
    for n in [16usize, 64, 256] {
        let u = state(n);
        let m = min_grid_size(n);
        group.bench_with_input(BenchmarkId::new("to_grid", n), &u, |b, u| {
            b.iter(|| to_grid(black_box(u), m).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("grad_h", n), &u, |b, u| {
            b.iter(|| grad_h(&spec, 0.1, black_box(u), m).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("strang_step", n), &u, |b, u| {
            b.iter(|| strang_step(black_box(u), 0.0, 1e-2, &spec, n, m).unwrap())
        });
    }
    group.finish();
}

fn geometry(c: &mut Criterion) {
    let pts: Vec<Vec<f64>> = (0..1000)
        .map(|i| {
            let t = i as f64 * 2.399_963;
            let r = ((i as f64 + 0.5) / 1000.0).sqrt();
            vec![r * t.cos(), r * t.sin()]
        })
        .collect();
    c.bench_function("min_enclosing_ball/1000x2", |b| {
        b.iter(|| min_enclosing_ball(black_box(&pts)).unwrap())
    });

    let sys =
        GenericHamiltonianSystem::new(4, |_, z| vec![z[0].sin(), z[1], z[2] + 0.1 * z[3], z[3] + 0.1 * z[2]]).unwrap();
    let z = [0.3, -0.2, 0.5, 0.1];
    c.bench_function("midpoint_step/4", |b| {
        b.iter(|| midpoint_step_generic(black_box(&z), 0.0, 1e-2, &sys).unwrap())
    });
}

criterion_group!(benches, spectral, geometry);
criterion_main!(benches);
