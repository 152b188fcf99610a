use std::f64::consts::PI;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use qring_bench::{asymmetric_ring, symmetric_ring};
use qring_core::{
    build_m, build_u, find_localized_k, flux_ring_response, localized_wavefunction, ring_smatrix,
    scattering_matrix, solve_ring_direct, FluxPhase, Incoming, NodeKind,
};

fn node(c: &mut Criterion) {
    let ring = symmetric_ring();
    c.bench_function("build_u", |b| b.iter(|| build_u(black_box(&ring.node_i))));
    c.bench_function("node_smatrix", |b| {
        b.iter(|| scattering_matrix(black_box(&ring.node_i), black_box(2.3), NodeKind::I))
    });
}

fn ring(c: &mut Criterion) {
    let mut g = c.benchmark_group("ring_response");
    for (name, ring) in [
        ("symmetric", symmetric_ring()),
        ("asymmetric", asymmetric_ring()),
    ] {
        g.bench_with_input(BenchmarkId::new("assembly", name), &ring, |b, r| {
            b.iter(|| {
                let (a, s) = r.node_scattering(black_box(2.3)).unwrap();
                ring_smatrix(&a, &s).unwrap()
            })
        });
        g.bench_with_input(BenchmarkId::new("direct_solve", name), &ring, |b, r| {
            b.iter(|| solve_ring_direct(r, black_box(2.3), FluxPhase(0.0), Incoming::FromX1))
        });
    }
    g.finish();

    let ring = symmetric_ring();
    c.bench_function("flux_response", |b| {
        b.iter(|| flux_ring_response(&ring, black_box(2.3), FluxPhase(black_box(1.1))))
    });
    c.bench_function("k_sweep_1000", |b| {
        b.iter(|| {
            (0..1000)
                .map(|j| {
                    let k = 0.05 + 9.95 * j as f64 / 999.0;
                    let (a, s) = ring.node_scattering(k).unwrap();
                    ring_smatrix(&a, &s)
                        .map(|m| m.transmission().norm_sqr())
                        .unwrap_or(0.0)
                })
                .sum::<f64>()
        })
    });
}

fn localized(c: &mut Criterion) {
    let ring = symmetric_ring();
    c.bench_function("matching_matrix_svd", |b| {
        b.iter(|| build_m(&ring, black_box(2.3)).unwrap().singular_values())
    });
    let mut g = c.benchmark_group("localized");
    g.sample_size(10);
    g.bench_function("find_localized_k_2000", |b| {
        b.iter(|| find_localized_k(&ring, 0.5 * PI, 2.5 * PI, 2000).unwrap())
    });
    g.finish();
    c.bench_function("localized_wavefunction", |b| {
        b.iter(|| localized_wavefunction(&ring, black_box(2)).unwrap())
    });
}

criterion_group!(benches, node, ring, localized);
criterion_main!(benches);
