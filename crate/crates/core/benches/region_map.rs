use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rd3_core::melnikov::{region_map, RegionGrid};
use rd3_core::Exec;

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("region_map");
    g.sample_size(10);
    for n in [50usize, 200] {
        let grid = RegionGrid { lo: -10.0, hi: 10.0, n };
        for exec in [Exec::Sequential, Exec::Parallel] {
            g.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), &grid, |b, grid| {
                b.iter(|| region_map(-1.0, 3.0, 5.0, *grid, exec).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
