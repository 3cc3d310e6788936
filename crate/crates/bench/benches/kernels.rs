use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use overlap_bench::dataset;
use overlap_core::{f_cdf, partover_test, t_cdf, Hypothesis};
use std::hint::black_box;

fn distributions(c: &mut Criterion) {
    let mut g = c.benchmark_group("cdf");
    for nu in [3.0, 30.0, 300.0] {
        g.bench_with_input(BenchmarkId::new("t_cdf", nu), &nu, |b, &nu| {
            b.iter(|| t_cdf(black_box(-2.1), nu))
        });
    }
    g.bench_function("f_cdf", |b| b.iter(|| f_cdf(black_box(2.7), 2.0, 27.0)));
    g.finish();
}

fn partover(c: &mut Criterion) {
    let mut g = c.benchmark_group("partover_test");
    let h = Hypothesis::new(0.0);
    for n in [5, 50, 500] {
        let s = dataset(n, n, n);
        g.bench_with_input(BenchmarkId::new("welch", n), &s, |b, s| b.iter(|| partover_test(s, &h, false)));
        g.bench_with_input(BenchmarkId::new("pooled", n), &s, |b, s| b.iter(|| partover_test(s, &h, true)));
    }
    g.finish();
}

criterion_group!(benches, distributions, partover);
criterion_main!(benches);
