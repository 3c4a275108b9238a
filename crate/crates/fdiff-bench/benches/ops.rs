use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use fdiff_bench::{divided_cube, six_star_exponential, square};
use fdiff_core::chain::chain_rule;
use fdiff_core::delta::delta;
use fdiff_core::diagram::{FinCat, SetDiagram};
use fdiff_core::functor::{check_taut, CheckParams};
use fdiff_core::newton::{delta_star, newton_sum};
use fdiff_core::FinSet;

fn bench_taut_check(c: &mut Criterion) {
    let f = divided_cube();
    c.bench_function("check_taut X^[3] exhaustive K=3", |b| {
        b.iter(|| black_box(check_taut(&f, &CheckParams::default())))
    });
}

fn bench_delta_eval(c: &mut Criterion) {
    let f = six_star_exponential();
    let d = delta(&f).unwrap();
    c.bench_function("delta 6_*^[X] memoized object at k=3", |b| {
        b.iter(|| black_box(d.at(&FinSet::atoms(3)).len()))
    });
    let swap = fdiff_core::FinFun::new(FinSet::atoms(3), FinSet::atoms(3), vec![1, 0, 2])
        .unwrap();
    c.bench_function("delta 6_*^[X] arrow map at k=3", |b| {
        // arrow maps are not memoized: this re-derives the complements
        b.iter(|| black_box(d.map(&swap).dom().len()))
    });
}

fn bench_colimit(c: &mut Criterion) {
    let shape = FinCat::cyclic_group(3);
    let d = SetDiagram::representable(&shape, 0);
    c.bench_function("colimit of the Z/3 representable", |b| {
        b.iter(|| black_box(d.colimit().0.len()))
    });
}

fn bench_newton(c: &mut Criterion) {
    let f = square();
    let ds = delta_star(&f, 3).unwrap();
    let sum = newton_sum(&ds);
    c.bench_function("newton sum of delta_star(X^2) at k=4", |b| {
        b.iter(|| black_box(sum.at(&FinSet::atoms(4)).len()))
    });
}

fn bench_chain_rule(c: &mut Criterion) {
    let f = square();
    let g = square();
    c.bench_function("chain-rule comparison component at k=2", |b| {
        let cr = chain_rule(&f, &g).unwrap();
        b.iter(|| black_box(cr.transf.at(&FinSet::atoms(2)).dom().len()))
    });
}

criterion_group!(
    benches,
    bench_taut_check,
    bench_delta_eval,
    bench_colimit,
    bench_newton,
    bench_chain_rule
);
criterion_main!(benches);
