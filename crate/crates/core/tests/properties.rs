mod common;

use std::collections::BTreeSet;

use kgraph_core::alignment::DEFAULT_CLOSURE_BUDGET;
use kgraph_core::fixtures::{acyclic_fixtures, random_spec};
use kgraph_core::repn::{boundary_rep, gap_product, verify_family, Rational};
use kgraph_core::{CKFamily, Degree, FamilyCollection, KGraph, Path, PathFamily, Universe};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(seed: u64, rank: usize, acyclic: bool) -> KGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    KGraph::new(random_spec(&mut rng, rank, 5, acyclic)).unwrap()
}

/// Paths of `g` inside a small window.
fn window(g: &KGraph) -> Vec<Path> {
    let bound = Degree::splat(g.rank(), if g.rank() == 2 { 2 } else { 1 });
    g.vertices().flat_map(|v| g.paths_up_to(v, &bound)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rewritten_words_normalise_alike(seed in any::<u64>(), rank in 2usize..=3, acyclic in any::<bool>()) {
        let g = graph(seed, rank, acyclic);
        let bound = Degree::splat(rank, 1);
        for v in g.vertices() {
            for n in bound.box_below() {
                let classes = common::word_classes(&g, v, &n);
                for class in &classes.classes {
                    let first = g.path_from_word(v, &class[0]).unwrap();
                    for w in class {
                        prop_assert_eq!(&g.path_from_word(v, w).unwrap(), &first);
                    }
                }
            }
        }
    }

    #[test]
    fn degree_is_additive(seed in any::<u64>(), pick in any::<u64>()) {
        let g = graph(seed, 2, false);
        let paths = window(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        for _ in 0..20 {
            let p = paths.choose(&mut rng).unwrap();
            let tails: Vec<&Path> = paths.iter().filter(|q| q.range() == p.source()).collect();
            let q = tails.choose(&mut rng).unwrap();
            let pq = g.compose(p, q).unwrap();
            prop_assert_eq!(pq.degree(), &(p.degree() + q.degree()));
            prop_assert!(g.has_prefix(&pq, p));
        }
    }

    #[test]
    fn mce_is_symmetric_and_ext_distributes(seed in any::<u64>(), pick in any::<u64>()) {
        let g = graph(seed, 2, true);
        let paths = g.all_paths().unwrap().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        for _ in 0..20 {
            let p = paths.choose(&mut rng).unwrap();
            let same: Vec<&Path> = paths.iter().filter(|q| q.range() == p.range()).collect();
            let q = same.choose(&mut rng).unwrap();
            prop_assert_eq!(g.mce(p, q), g.mce(q, p));
            let e = PathFamily::new(p.range(), same.choose_multiple(&mut rng, 2).map(|x| (*x).clone())).unwrap();
            let f = PathFamily::new(p.range(), same.choose_multiple(&mut rng, 2).map(|x| (*x).clone())).unwrap();
            let both = PathFamily::new(p.range(), e.iter().chain(f.iter()).cloned()).unwrap();
            let union: BTreeSet<Path> =
                g.ext(p, &e).unwrap().iter().chain(g.ext(p, &f).unwrap().iter()).cloned().collect();
            let joint = g.ext(p, &both).unwrap();
            prop_assert_eq!(joint.members(), &union);
        }
    }

    #[test]
    fn closure_is_a_closure(seed in any::<u64>(), pick in any::<u64>()) {
        let g = graph(seed, 2, true);
        let paths = g.all_paths().unwrap().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let seed_set: BTreeSet<Path> = paths.choose_multiple(&mut rng, 3).cloned().collect();
        let closed = g.pi_closure(&seed_set, DEFAULT_CLOSURE_BUDGET).unwrap();
        prop_assert!(seed_set.is_subset(&closed));
        prop_assert_eq!(&g.pi_closure(&closed, DEFAULT_CLOSURE_BUDGET).unwrap(), &closed);
        for (l, m) in g.pairs_ds(&closed) {
            for sigma in &closed {
                for alpha in g.ext_of(&m, std::iter::once(sigma)) {
                    prop_assert!(closed.contains(&g.compose(&l, &alpha).unwrap()));
                }
            }
        }
    }
}

#[test]
fn satiation_consistency_at_the_operator_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, g) in acyclic_fixtures() {
        let u = Universe::exact(&g).unwrap();
        let all: Vec<PathFamily> = u.iter().cloned().collect();
        for _ in 0..3 {
            let gens = FamilyCollection::new(all.choose_multiple(&mut rng, 2).cloned());
            let s = u.satiate(&gens).unwrap();
            let t: CKFamily<Rational> = boundary_rep(&u, &s).unwrap();
            assert!(verify_family(&g, &t, &gens).unwrap().passed(), "{name}");
            assert!(verify_family(&g, &t, &s).unwrap().passed(), "{name}");
        }
    }
}

/// Gaps of `F` outside `S`, moved along a boundary path that avoids `F`,
/// stay nonzero.
#[test]
fn moved_gaps_stay_nonzero() {
    for (name, g) in acyclic_fixtures() {
        let u = Universe::exact(&g).unwrap();
        let s = u.satiate(&FamilyCollection::new(u.iter().take(1).cloned())).unwrap();
        let t: CKFamily<Rational> = boundary_rep(&u, &s).unwrap();
        for f in u.iter().filter(|f| !s.contains(f)) {
            let x = u.construct_boundary(f.range(), &s, Some(f)).unwrap();
            for n in x.degree().box_below() {
                let head = g.segment(x.path(), &Degree::zero(g.rank()), &n).unwrap();
                let moved = g.ext(&head, f).unwrap();
                let gap = gap_product(&g, &t, head.source(), moved.iter()).unwrap();
                assert!(!gap.is_zero(), "{name}: gap of {} vanishes at {:?}", u.show(f), head);
            }
        }
    }
}
