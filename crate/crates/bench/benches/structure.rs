use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use valdef_bench::{alternating, mixed, towers};
use valdef_core::decide::{self, DEFAULT_PRIMES};
use valdef_core::oag::{self, Element};
use valdef_core::oracle::{self, BoxSpec};

fn predicates(c: &mut Criterion) {
    let mut group = c.benchmark_group("predicates");
    for rank in [2, 8, 32] {
        let g = alternating(rank);
        group.bench_with_input(BenchmarkId::new("p_regular", rank), &g, |b, g| {
            b.iter(|| oag::is_p_regular(black_box(g), 3))
        });
        group.bench_with_input(BenchmarkId::new("p_antiregular", rank), &g, |b, g| {
            b.iter(|| oag::is_p_antiregular(black_box(g), 3))
        });
        group.bench_with_input(BenchmarkId::new("delta0", rank), &g, |b, g| b.iter(|| oag::delta0(black_box(g), 2)));
        let mut coords = vec![0; rank];
        coords[rank - 1] = 1;
        let gamma = Element::from_ints(&g, &coords).unwrap();
        group.bench_with_input(BenchmarkId::new("delta_gamma", rank), &g, |b, g| {
            b.iter(|| oag::delta_gamma(black_box(g), 2, &gamma).unwrap())
        });
    }
    for blocks in [4, 16] {
        let g = mixed(blocks);
        group.bench_with_input(BenchmarkId::new("mixed_antiregular", blocks), &g, |b, g| {
            b.iter(|| oag::is_antiregular(black_box(g)))
        });
        group.bench_with_input(BenchmarkId::new("mixed_normalize", blocks), &g, |b, g| {
            b.iter(|| oag::equiv_normalize(black_box(g)))
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for rank in [1, 2, 3] {
        let g = alternating(rank);
        let bx = BoxSpec::for_prime(2, 6);
        group.bench_with_input(BenchmarkId::new("bf_p_regular", rank), &g, |b, g| {
            b.iter(|| oracle::bf_is_p_regular(black_box(g), 2, &bx).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bf_delta0", rank), &g, |b, g| {
            b.iter(|| oracle::bf_delta0(black_box(g), 2, &bx).unwrap())
        });
    }
    group.finish();
}

fn decisions(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide");
    for (name, t) in towers() {
        group.bench_with_input(BenchmarkId::new("analyze", name), &t, |b, t| {
            b.iter(|| decide::analyze(black_box(t), &DEFAULT_PRIMES))
        });
    }
    group.finish();
}

criterion_group!(benches, predicates, oracle, decisions);
criterion_main!(benches);
