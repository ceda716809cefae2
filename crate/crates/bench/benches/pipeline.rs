use criterion::{black_box, criterion_group, criterion_main, Criterion};

use apcap::{
    ap_tensor, asymptotic_bq, caro_wei_greedy, degree_profile, find_distinct_solution,
    monomial_count, slice_rank_exact_small, support_hypergraph, CoeffVector, FieldCtx,
    PointSet, SparseTensor,
};
use apcap_bench::{random_set, triple};

fn bench_degree_profile(c: &mut Criterion) {
    let t = triple(3, 1, 1, 1);
    let set = random_set(3, 5, 0.4, 11);
    c.bench_function("degree_profile q3 n5", |b| {
        b.iter(|| degree_profile(black_box(&set), &t).unwrap())
    });
}

fn bench_monomial_count(c: &mut Criterion) {
    c.bench_function("monomial_count q3 n200", |b| {
        b.iter(|| monomial_count(black_box(3), black_box(200)))
    });
}

fn bench_bq(c: &mut Criterion) {
    c.bench_function("asymptotic_bq q3", |b| b.iter(|| asymptotic_bq(black_box(3), 1e-12)));
}

fn bench_slice_rank(c: &mut Criterion) {
    let mut diag = SparseTensor::new(3, 2, 2);
    diag.set(vec![1, 1, 1], 1);
    diag.set(vec![2, 2, 2], 1);
    c.bench_function("slice_rank q2 N2 diagonal", |b| {
        b.iter(|| slice_rank_exact_small(black_box(&diag)).unwrap())
    });
}

fn bench_caro_wei(c: &mut Criterion) {
    let t = triple(3, 1, 1, 1);
    let set = random_set(3, 3, 0.6, 3);
    let tensor = ap_tensor(&set, &t).unwrap();
    let all: Vec<u32> = (1..=set.len() as u32).collect();
    let h = support_hypergraph(&tensor, &all);
    c.bench_function("caro_wei_greedy 200 trials", |b| {
        b.iter(|| caro_wei_greedy(black_box(&h), 200, 42))
    });
}

fn bench_chain(c: &mut Criterion) {
    let ctx = FieldCtx::new(3).unwrap();
    let cv = CoeffVector::new(&ctx, vec![1, 1, 2, 2]).unwrap();
    let set = PointSet::full_space(3, 2).unwrap();
    c.bench_function("chain_solver q3 full plane d4", |b| {
        b.iter(|| find_distinct_solution(black_box(&set), &cv, 1_000_000).unwrap())
    });
}

criterion_group!(
    benches,
    bench_degree_profile,
    bench_monomial_count,
    bench_bq,
    bench_slice_rank,
    bench_caro_wei,
    bench_chain
);
criterion_main!(benches);
