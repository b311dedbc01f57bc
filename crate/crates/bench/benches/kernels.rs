use std::hint::black_box;
use std::time::Duration;

use catlab::{enumerate_prime_orbits, husimi, propagator, CatMap, LinearMap, PlanckGrid, QuantumState};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn propagator_apply(c: &mut Criterion) {
    let map = CatMap::arnold();
    let mut group = c.benchmark_group("propagator_apply");
    for n in [256usize, 4096, 65536] {
        let grid = PlanckGrid::for_map(&map, n).unwrap();
        let prop = propagator(&map, grid).unwrap();
        let psi = QuantumState::random(grid, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &psi.amps, |b, x| {
            b.iter(|| prop.apply(black_box(x)))
        });
    }
    group.finish();
}

fn husimi_grid(c: &mut Criterion) {
    let map = CatMap::arnold();
    let mut group = c.benchmark_group("husimi_grid");
    group.sample_size(10).measurement_time(Duration::from_secs(5));
    for (n, g) in [(256usize, 128usize), (1024, 256), (4096, 512)] {
        let grid = PlanckGrid::for_map(&map, n).unwrap();
        let psi = QuantumState::random(grid, 11);
        group.bench_function(BenchmarkId::new(format!("N{n}"), g), |b| {
            b.iter(|| husimi(black_box(&psi), &map, g).unwrap())
        });
    }
    group.finish();
}

fn orbit_enumeration(c: &mut Criterion) {
    let map = CatMap::arnold();
    let mut group = c.benchmark_group("prime_orbits");
    for t in [4u32, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| enumerate_prime_orbits(&map, t, 1 << 20).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, propagator_apply, husimi_grid, orbit_enumeration);
criterion_main!(benches);
