use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orbitkit::{hermitian_eigen, normal_eigen, polar, singular_values};
use orbitkit_bench::{hermitian, normal};

fn eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigen");
    for dim in [8, 16, 32, 64] {
        let h = hermitian(dim);
        g.bench_with_input(BenchmarkId::new("hermitian", dim), &h, |b, h| {
            b.iter(|| hermitian_eigen(h).unwrap())
        });
        let x = normal(dim);
        g.bench_with_input(BenchmarkId::new("normal", dim), &x, |b, x| {
            b.iter(|| normal_eigen(x).unwrap())
        });
    }
    g.finish();
}

fn decompositions(c: &mut Criterion) {
    let mut g = c.benchmark_group("decompositions");
    for dim in [8, 32] {
        let x = normal(dim);
        g.bench_with_input(BenchmarkId::new("singular_values", dim), &x, |b, x| {
            b.iter(|| singular_values(x))
        });
        g.bench_with_input(BenchmarkId::new("polar", dim), &x, |b, x| {
            b.iter(|| polar(x))
        });
    }
    g.finish();
}

criterion_group!(benches, eigen, decompositions);
criterion_main!(benches);
