use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orbitkit::{
    construct_intertwiner, materialize, nonseparable_demo, orbit_verdict, shift_topology_demo,
    solve_commutator, RatioReference,
};
use orbitkit_bench::profile_pair;

fn verdicts(c: &mut Criterion) {
    let mut g = c.benchmark_group("orbit");
    for distinct in [4, 16, 64] {
        let (a, b) = profile_pair(distinct);
        g.bench_with_input(
            BenchmarkId::new("verdict", distinct),
            &(&a, &b),
            |bn, (a, b)| bn.iter(|| orbit_verdict(a, b).unwrap()),
        );
        let dim = a.minimal_dim();
        g.bench_with_input(
            BenchmarkId::new("intertwiner", distinct),
            &(&a, &b),
            |bn, (a, b)| bn.iter(|| construct_intertwiner(a, b, 0.0, dim).unwrap()),
        );
    }
    g.finish();
}

fn commutator(c: &mut Criterion) {
    let (p, _) = profile_pair(8);
    let dim = p.minimal_dim();
    let (a, fam) = materialize(&p, dim).unwrap();
    // y = [x, a] has zero block diagonal
    let x = orbitkit_bench::hermitian(dim);
    let y = &x.matmul(&a).unwrap() - &a.matmul(&x).unwrap();
    c.bench_function("solve_commutator", |b| {
        b.iter(|| solve_commutator(&p, &fam, &y).unwrap())
    });
}

fn demos(c: &mut Criterion) {
    let eigs: Vec<f64> = (1..=16).map(|k| 1.0 / k as f64).collect();
    c.bench_function("shift_demo_16", |b| {
        b.iter(|| shift_topology_demo(&eigs, 8).unwrap())
    });
    let reference = RatioReference::harmonic(64);
    c.bench_function("nonseparable_demo_32", |b| {
        b.iter(|| nonseparable_demo(&reference, 32, 16).unwrap())
    });
}

criterion_group!(benches, verdicts, commutator, demos);
criterion_main!(benches);
