use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use skewk_core::abgroup::{AbGroup, Automorphism};
use skewk_core::ff::build_field_bounded;
use skewk_core::ktheory::stability_check;
use skewk_core::oracle::{analyze, OracleConfig};
use skewk_core::skewring::{colimit_k0, decompose, k0_ring, SkewRingDesc};
use skewk_core::ss::verify_main;

fn desc(p: u64, f: u32, n: u32, factors: &[u32], u: u64) -> SkewRingDesc {
    let g = AbGroup::new(factors.to_vec()).unwrap();
    let theta = Automorphism::scalar(&g, u).unwrap();
    SkewRingDesc::new(p, f, n, g, theta).unwrap()
}

fn field_arithmetic(c: &mut Criterion) {
    let k = build_field_bounded(7, 8, 1 << 31).unwrap();
    for (name, bound) in [("gf7^8 tables", 1u64 << 31), ("gf7^8 polynomial", 1 << 20)] {
        let ops = k.ops(bound);
        c.bench_function(name, |b| {
            b.iter(|| {
                let mut x = 12345u32;
                for y in 1..1000u32 {
                    x = ops.add(ops.mul(x, y * 5003), 1);
                }
                black_box(x)
            })
        });
    }
}

fn formulas(c: &mut Criterion) {
    let d = desc(5, 2, 4, &[2, 8], 3);
    c.bench_function("decompose 5/2/4 Z2xZ8", |b| b.iter(|| decompose(black_box(&d))));
    c.bench_function("k0_ring 5/2/4 Z2xZ8", |b| b.iter(|| k0_ring(black_box(&d)).unwrap()));
    c.bench_function("colimit 2,3 imax 5", |b| b.iter(|| colimit_k0(2, 3, 5).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    let cfg = OracleConfig::default();
    for (name, d) in [
        ("f2 Z3 classical", desc(2, 1, 1, &[3], 1)),
        ("5/1/2 Z2xZ8", desc(5, 1, 2, &[2, 8], 3)),
        ("7/2/4 Z5 polynomial", desc(7, 2, 4, &[5], 2)),
    ] {
        g.bench_function(name, |b| b.iter(|| analyze(black_box(&d), &cfg).unwrap()));
    }
    g.finish();
}

fn k_theory(c: &mut Criterion) {
    c.bench_function("verify_main 7,3 n=40", |b| b.iter(|| verify_main(7, 3, 40).unwrap()));
    c.bench_function("stability 2,7 6x10", |b| b.iter(|| stability_check(2, 7, 6, 10).unwrap()));
}

criterion_group!(benches, field_arithmetic, formulas, oracle, k_theory);
criterion_main!(benches);
