use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use widthlab::pde::GridDiffusionModel;
use widthlab::width::{empirical_lipschitz, entropy_greedy};
use widthlab::Execution;

fn lipschitz_sweep(c: &mut Criterion) {
    let model = GridDiffusionModel::new(3, 24).expect("model");
    let mut g = c.benchmark_group("lipschitz_pairs");
    g.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| black_box(empirical_lipschitz(&model, 32, 7, exec, 1e-6).expect("sweep").max_ratio))
        });
    }
    g.finish();
}

fn greedy_cover(c: &mut Criterion) {
    let pts: Vec<[f64; 2]> = (0..4000).map(|i| [(i as f64 * 0.618).fract(), (i as f64 * 0.414).fract()]).collect();
    let dist = |a: &[f64; 2], b: &[f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let mut g = c.benchmark_group("entropy_greedy");
    for exec in [Execution::Sequential, Execution::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| black_box(entropy_greedy(&pts, 8, dist, exec).radii[8]))
        });
    }
    g.finish();
}

criterion_group!(benches, lipschitz_sweep, greedy_cover);
criterion_main!(benches);
