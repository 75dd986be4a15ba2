use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kgraph_bench::{grids, halves};
use kgraph_core::fixtures::{acyclic_fixtures, omega};
use kgraph_core::repn::{boundary_rep, Rational};
use kgraph_core::{CKFamily, Degree, FamilyCollection, Universe};

fn compose(c: &mut Criterion) {
    let mut group = c.benchmark_group("compose");
    for (name, g) in grids(&[2, 4, 8]) {
        let (a, b) = halves(&g);
        group.bench_with_input(BenchmarkId::from_parameter(&name), &(a, b), |bench, (a, b)| {
            bench.iter(|| g.compose(black_box(a), black_box(b)).unwrap())
        });
    }
    group.finish();
}

fn satiate(c: &mut Criterion) {
    let g = omega(2, &Degree::from([2, 1]));
    let u = Universe::exact(&g).unwrap();
    let first = u.iter().next().unwrap().clone();
    let gens = FamilyCollection::new([first]);
    c.bench_function("satiate omega_2_(2,1)", |b| b.iter(|| u.satiate(black_box(&gens)).unwrap()));
}

fn represent(c: &mut Criterion) {
    let mut group = c.benchmark_group("boundary_rep");
    for (name, g) in acyclic_fixtures() {
        let u = Universe::exact(&g).unwrap();
        let s = u.satiate(&FamilyCollection::empty()).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| {
                let t: CKFamily<Rational> = boundary_rep(&u, black_box(&s)).unwrap();
                t
            })
        });
    }
    group.finish();
}

criterion_group!(benches, compose, satiate, represent);
criterion_main!(benches);
