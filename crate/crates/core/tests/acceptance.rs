//! The acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout.
//! Exits non-zero if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{all_satiated, check_factorisation, check_normal_forms, ext_oracle, mask_subset, to_masks, ClassCache, FeOracle};
use kgraph_core::alignment::DEFAULT_CLOSURE_BUDGET;
use kgraph_core::fixtures::{acyclic_fixtures, g1, omega, random_spec, OMEGA11_A};
use kgraph_core::repn::{
    boundary_rep, canonical_windows, expectation_contraction_check, faithful_on_core_check, formal_theta,
    gap_product, gauge_average_check, gauge_unitary_check, matrix_unit_check, sample_torus, shift_gaps_check, theta,
    Rational, UniquenessCertificate,
};
use kgraph_core::{CKFamily, Degree, FamilyCollection, FormalElement, KGraph, Membership, Path, PathFamily, Universe};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `satiate(no generators)`, `satiate(one random family)` and the full window.
fn three_choices(u: &Universe<'_>, rng: &mut ChaCha8Rng) -> Result<Vec<(&'static str, FamilyCollection)>, String> {
    let all: Vec<&PathFamily> = u.iter().collect();
    let pick = (*all.choose(rng).ok_or("empty universe")?).clone();
    Ok(vec![
        ("satiate()", u.satiate(&FamilyCollection::empty()).map_err(err)?),
        ("satiate(one)", u.satiate(&FamilyCollection::new([pick])).map_err(err)?),
        ("full", u.full()),
    ])
}

fn random_seed_set(g: &KGraph, rng: &mut ChaCha8Rng) -> BTreeSet<Path> {
    let all = g.all_paths().unwrap();
    let n = rng.gen_range(1..=3);
    all.choose_multiple(rng, n).cloned().collect()
}

fn random_formal(g: &KGraph, rng: &mut ChaCha8Rng, terms: usize) -> FormalElement<Complex64> {
    let all = g.all_paths().unwrap();
    let mut a = FormalElement::zero();
    while a.terms().len() < terms {
        let lam = all.choose(rng).unwrap();
        let partners: Vec<&Path> = all.iter().filter(|m| m.source() == lam.source()).collect();
        let mu = partners.choose(rng).unwrap();
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        a.add_term(lam.clone(), (*mu).clone(), c).unwrap();
        // Distinct pairs only; a graph with too few pairs stops early.
        let pairs: usize = all.iter().map(|l| all.iter().filter(|m| m.source() == l.source()).count()).sum();
        if a.terms().len() >= pairs {
            break;
        }
    }
    a
}

fn factorisation() -> Outcome {
    let mut graphs: Vec<(String, KGraph, Option<Degree>)> = vec![
        ("omega_1_(3)".into(), omega(1, &[3].into()), None),
        ("omega_2_(1,1)".into(), omega(2, &[1, 1].into()), None),
        ("omega_2_(2,1)".into(), omega(2, &[2, 1].into()), None),
        ("G1".into(), g1(), Some([3, 3].into())),
    ];
    let mut r = rng(1);
    for i in 0..20 {
        let rank = 2 + i % 2;
        let acyclic = i % 4 < 2;
        let g = KGraph::new(random_spec(&mut r, rank, 6, acyclic)).map_err(err)?;
        let window = if acyclic { None } else { Some(Degree::splat(rank, if rank == 2 { 2 } else { 1 })) };
        graphs.push((format!("random #{i} (rank {rank})"), g, window));
    }
    let (mut paths_checked, mut splits) = (0usize, 0usize);
    for (name, g, window) in &graphs {
        let mut cache = ClassCache::default();
        let paths: Vec<Path> = match window {
            None => g.all_paths().map_err(err)?.to_vec(),
            Some(w) => g.vertices().flat_map(|v| g.paths_up_to(v, w)).collect(),
        };
        let mut seen = BTreeSet::new();
        for p in &paths {
            if seen.insert((p.range(), p.degree().clone())) {
                check_normal_forms(g, &mut cache, p.range(), p.degree()).map_err(|e| format!("{name}: {e}"))?;
            }
            for m in p.degree().box_below() {
                check_factorisation(g, &mut cache, p, &m).map_err(|e| format!("{name}: {e}"))?;
                splits += 1;
            }
            paths_checked += 1;
        }
    }
    Ok(format!("{} graphs, {paths_checked} paths, {splits} splits", graphs.len()))
}

fn extension_composes() -> Outcome {
    let mut graphs: Vec<(String, KGraph)> = acyclic_fixtures().into_iter().map(|(n, g)| (n.to_string(), g)).collect();
    graphs.push(("G1".into(), g1()));
    let window: Degree = [2, 2].into();
    let mut r = rng(2);
    let mut done = 0;
    while done < 500 {
        let (name, g) = graphs.choose(&mut r).unwrap();
        let from = |v| -> Vec<Path> {
            if g.is_acyclic() {
                g.paths_from(v).unwrap()
            } else {
                g.paths_up_to(v, &window)
            }
        };
        let v = g.vertices().collect::<Vec<_>>()[r.gen_range(0..g.vertex_count())];
        let at_v = from(v);
        let nonvertex: Vec<&Path> = at_v.iter().filter(|p| !p.is_vertex()).collect();
        if nonvertex.is_empty() {
            continue;
        }
        let l1 = at_v.choose(&mut r).unwrap().clone();
        let l2 = from(l1.source()).choose(&mut r).unwrap().clone();
        let size = r.gen_range(1..=nonvertex.len().min(3));
        let e = PathFamily::new(v, nonvertex.choose_multiple(&mut r, size).map(|p| (*p).clone())).map_err(err)?;
        let first = g.ext(&l1, &e).map_err(err)?;
        let lhs = g.ext(&l2, &first).map_err(err)?;
        let joined = g.compose(&l1, &l2).map_err(err)?;
        let rhs = g.ext(&joined, &e).map_err(err)?;
        ensure!(lhs == rhs, "{name}: ext(l2, ext(l1, E)) = {lhs:?} but ext(l1 l2, E) = {rhs:?}");
        ensure!(*first.members() == ext_oracle(g, &l1, &e), "{name}: ext({l1:?}, {e:?}) differs from the definition");
        ensure!(*rhs.members() == ext_oracle(g, &joined, &e), "{name}: ext({joined:?}, {e:?}) differs from the definition");
        done += 1;
    }
    Ok(format!("{done} instances"))
}

fn matrix_units() -> Outcome {
    let mut r = rng(3);
    let mut grids = 0;
    for (name, g) in acyclic_fixtures() {
        let u = Universe::exact(&g).map_err(err)?;
        for (label, s) in three_choices(&u, &mut r)? {
            let t: CKFamily<Rational> = boundary_rep(&u, &s).map_err(err)?;
            for _ in 0..10 {
                let seed = random_seed_set(&g, &mut r);
                let pie = g.pi_closure(&seed, DEFAULT_CLOSURE_BUDGET).map_err(err)?;
                for outcome in matrix_unit_check(&g, &t, &pie).map_err(err)? {
                    ensure!(
                        outcome.passed && outcome.deviation == 0.0,
                        "{name}, {label}: {} deviates by {} at {:?}",
                        outcome.name,
                        outcome.deviation,
                        outcome.witness
                    );
                }
                for (l, m) in g.pairs_ds(&pie) {
                    let direct = theta(&g, &t, &pie, &l, &m).map_err(err)?;
                    let formal = formal_theta::<Rational>(&g, &pie, &l, &m).map_err(err)?.eval(&t).map_err(err)?;
                    ensure!(direct == formal, "{name}, {label}: formal and direct matrix units differ at ({l:?}, {m:?})");
                }
                grids += 1;
            }
        }
    }
    Ok(format!("{grids} grids, deviation 0"))
}

fn satiation() -> Outcome {
    let mut summary = Vec::new();
    let mut r = rng(4);
    for (name, g) in [("omega_2_(1,1)", omega(2, &[1, 1].into())), ("omega_2_(2,1)", omega(2, &[2, 1].into()))] {
        let u = Universe::exact(&g).map_err(err)?;
        let o = FeOracle::new(&g);
        ensure!(o.len() == u.len(), "{name}: universe has {} families, brute force finds {}", u.len(), o.len());
        let all = o.all();
        let sat = all_satiated(&g, &o);
        // The oracle must reject an upward closure that ignores extensions.
        let a = g.parse_path(OMEGA11_A).map_err(err)?;
        let up_a: Vec<PathFamily> = all.iter().filter(|f| f.contains(&a)).cloned().collect();
        ensure!(!common::is_satiated_oracle(&g, &o, &to_masks(&o, up_a)), "{name}: oracle accepts the upward closure of {{a}}");
        let mut gens: Vec<Vec<PathFamily>> = vec![vec![]];
        for (i, a) in all.iter().enumerate() {
            gens.push(vec![a.clone()]);
            for b in &all[i + 1..] {
                gens.push(vec![a.clone(), b.clone()]);
            }
        }
        for c in &gens {
            let cm = to_masks(&o, c.iter().cloned());
            let mut meet: Option<BTreeMap<_, u64>> = None;
            for s in sat.iter().filter(|s| mask_subset(&cm, s)) {
                meet = Some(match meet {
                    None => s.clone(),
                    Some(m) => m.iter().map(|(v, x)| (*v, x & s.get(v).copied().unwrap_or(0))).collect(),
                });
            }
            let expect = common::from_masks(&o, &meet.ok_or("no satiated collection contains C")?);
            let got = u.satiate(&FamilyCollection::new(c.iter().cloned())).map_err(err)?;
            ensure!(
                *got.members() == expect,
                "{name}: satiate({c:?}) has {} members, the intersection has {}",
                got.len(),
                expect.len()
            );
        }
        for _ in 0..50 {
            let pick = |r: &mut ChaCha8Rng| -> FamilyCollection {
                let n = r.gen_range(0..=4);
                FamilyCollection::new(all.choose_multiple(r, n).cloned())
            };
            let c = pick(&mut r);
            let d: FamilyCollection = c.iter().cloned().chain(pick(&mut r).iter().cloned()).collect();
            let sc = u.satiate(&c).map_err(err)?;
            let sd = u.satiate(&d).map_err(err)?;
            ensure!(c.is_subset(&sc), "{name}: satiation is not extensive on {c:?}");
            ensure!(sc.is_subset(&sd), "{name}: satiation is not monotone on {c:?}");
            ensure!(u.satiate(&sc).map_err(err)? == sc, "{name}: satiation is not idempotent on {c:?}");
            ensure!(
                common::is_satiated_oracle(&g, &o, &to_masks(&o, sc.iter().cloned())),
                "{name}: satiate({c:?}) fails the axioms"
            );
        }
        summary.push(format!("{name}: {} satiated collections, {} generators", sat.len(), gens.len()));
    }
    Ok(summary.join("; "))
}

fn nonzero_units() -> Outcome {
    let mut r = rng(5);
    let mut checked = 0;
    for (name, g) in acyclic_fixtures() {
        let u = Universe::exact(&g).map_err(err)?;
        for (label, s) in three_choices(&u, &mut r)? {
            let t: CKFamily<Rational> = boundary_rep(&u, &s).map_err(err)?;
            for e in u.iter() {
                let zero = gap_product(&g, &t, e.range(), e.iter()).map_err(err)?.is_zero();
                let member = u.member(e, &s) == Membership::Yes;
                ensure!(zero == member, "{name}, {label}: gap of {} is zero = {zero}, member = {member}", u.show(e));
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} families"))
}

fn faithful() -> Outcome {
    let mut r = rng(6);
    let (mut windows_checked, mut strict_pairs) = (0, 0);
    for (name, g) in acyclic_fixtures() {
        let u = Universe::exact(&g).map_err(err)?;
        let choices = three_choices(&u, &mut r)?;
        let reps: Vec<CKFamily<Rational>> =
            choices.iter().map(|(_, s)| boundary_rep(&u, s)).collect::<Result<_, _>>().map_err(err)?;
        for ((label, s), t) in choices.iter().zip(&reps) {
            let mut windows = canonical_windows(&u, s);
            windows.extend((0..10).map(|_| random_seed_set(&g, &mut r)));
            for w in &windows {
                let v = faithful_on_core_check(&u, s, t, std::slice::from_ref(w)).map_err(err)?;
                ensure!(
                    v.route_a && v.route_b,
                    "{name}, {label}: not faithful on window {w:?}: {:?} {:?}",
                    v.failures_a,
                    v.failures_b
                );
                windows_checked += 1;
            }
        }
        for i in 0..choices.len() {
            for j in 0..choices.len() {
                let (s, bigger) = (&choices[i].1, &choices[j].1);
                if !(s.is_subset(bigger) && s != bigger) {
                    continue;
                }
                let v = faithful_on_core_check(&u, s, &reps[j], &canonical_windows(&u, s)).map_err(err)?;
                ensure!(
                    !v.route_a && !v.route_b,
                    "{name}: rep of {} against {} gives routes ({}, {})",
                    choices[j].0,
                    choices[i].0,
                    v.route_a,
                    v.route_b
                );
                strict_pairs += 1;
            }
        }
    }
    Ok(format!("{windows_checked} faithful windows, {strict_pairs} strict pairs rejected by both routes"))
}

fn shift_gaps() -> Outcome {
    let mut r = rng(7);
    let mut setups = Vec::new();
    for (name, g) in acyclic_fixtures() {
        setups.push((name, g));
    }
    let mut reps = Vec::new();
    for (name, g) in &setups {
        let u = Universe::exact(g).map_err(err)?;
        for (label, s) in three_choices(&u, &mut r)? {
            let t: CKFamily<Rational> = boundary_rep(&u, &s).map_err(err)?;
            reps.push((*name, label, g, t));
        }
    }
    let mut done = 0;
    while done < 200 {
        let (name, label, g, t) = reps.choose(&mut r).unwrap();
        let v = g.vertices().collect::<Vec<_>>()[r.gen_range(0..g.vertex_count())];
        let from = g.paths_from(v).map_err(err)?;
        let nonvertex: Vec<&Path> = from.iter().filter(|p| !p.is_vertex()).collect();
        if nonvertex.is_empty() {
            continue;
        }
        let size = r.gen_range(1..=nonvertex.len().min(3));
        let e = PathFamily::new(v, nonvertex.choose_multiple(&mut r, size).map(|p| (*p).clone())).map_err(err)?;
        let mu = from.choose(&mut r).unwrap();
        let dev = shift_gaps_check(g, t, &e, mu).map_err(err)?;
        ensure!(dev == 0.0, "{name}, {label}: deviation {dev} at E = {e:?}, mu = {mu:?}");
        done += 1;
    }
    Ok(format!("{done} instances, deviation 0"))
}

fn gauge() -> Outcome {
    let mut r = rng(8);
    let (mut worst_u, mut worst_avg): (f64, f64) = (0.0, 0.0);
    for (name, g) in acyclic_fixtures() {
        let u = Universe::exact(&g).map_err(err)?;
        for (label, s) in three_choices(&u, &mut r)? {
            let t: CKFamily<Complex64> = boundary_rep(&u, &s).map_err(err)?;
            let zs = sample_torus(g.rank(), 8, r.gen());
            let dev = gauge_unitary_check(&t, &zs).map_err(err)?;
            ensure!(dev <= 1e-12, "{name}, {label}: gauge unitaries deviate by {dev}");
            worst_u = worst_u.max(dev);
            for _ in 0..5 {
                let a = random_formal(&g, &mut r, 10);
                let dev = gauge_average_check(&g, &t, &a).map_err(err)?;
                ensure!(dev <= 1e-9, "{name}, {label}: expectation and averaged conjugation differ by {dev}");
                worst_avg = worst_avg.max(dev);
            }
        }
    }
    Ok(format!("worst unitary deviation {worst_u:.1e}, worst averaging deviation {worst_avg:.1e}"))
}

fn contraction() -> Outcome {
    let mut r = rng(9);
    let mut certified = Vec::new();
    let mut worst_gap = f64::NEG_INFINITY;
    for (name, g) in acyclic_fixtures() {
        let u = Universe::exact(&g).map_err(err)?;
        for (label, s) in three_choices(&u, &mut r)? {
            if !u.condition_c(&s).map_err(err)?.holds() {
                continue;
            }
            let t: CKFamily<Complex64> = boundary_rep(&u, &s).map_err(err)?;
            let cert = UniquenessCertificate::establish(&u, &s, &t).map_err(|e| format!("{name}, {label}: {e}"))?;
            for _ in 0..100 {
                let a = random_formal(&g, &mut r, 10);
                let (lhs, rhs) = expectation_contraction_check(&cert, &t, &a).map_err(|e| format!("{name}, {label}: {e}"))?;
                ensure!(lhs <= rhs + 1e-9, "{name}, {label}: |Phi(a)| = {lhs} > |a| = {rhs}");
                worst_gap = worst_gap.max(lhs - rhs);
            }
            certified.push(format!("{name}/{label}"));
        }
    }
    ensure!(!certified.is_empty(), "no fixture has a clean condition (C)");
    Ok(format!("{} certified representations, max |Phi(a)| - |a| = {worst_gap:.1e}", certified.len()))
}

/// Boundary paths at `v` straight from the definition: at every vertex
/// `x(n)` along `x`, each member of `S` there has a prefix of the tail.
fn boundary_oracle(g: &KGraph, s: &FamilyCollection, v: kgraph_core::VertexId) -> BTreeSet<Path> {
    g.paths_from(v)
        .unwrap()
        .into_iter()
        .filter(|x| {
            x.degree().box_below().iter().all(|n| {
                let tail = g.segment(x, n, x.degree()).unwrap();
                s.at(tail.range()).all(|e| e.iter().any(|lam| g.has_prefix(&tail, lam)))
            })
        })
        .collect()
}

fn boundary_existence() -> Outcome {
    let mut r = rng(10);
    let (mut collections, mut constructions) = (0, 0);
    for (name, g) in acyclic_fixtures() {
        let u = Universe::exact(&g).map_err(err)?;
        let mut sats: Vec<FamilyCollection> = three_choices(&u, &mut r)?.into_iter().map(|(_, s)| s).collect();
        let all: Vec<PathFamily> = u.iter().cloned().collect();
        for _ in 0..5 {
            let n = r.gen_range(1..=2);
            sats.push(u.satiate(&FamilyCollection::new(all.choose_multiple(&mut r, n).cloned())).map_err(err)?);
        }
        for s in &sats {
            for v in g.vertices() {
                let listed: BTreeSet<Path> =
                    u.boundary_paths(v, s).map_err(|e| format!("{name}: {e}"))?.into_iter().map(|x| x.into_path()).collect();
                ensure!(!listed.is_empty(), "{name}: no boundary path at {}", g.vertex_name(v));
                ensure!(listed == boundary_oracle(&g, s, v), "{name}: boundary set at {} differs from the definition", g.vertex_name(v));
                for f in u.at(v).iter().filter(|f| !s.contains(f)) {
                    let x = u.construct_boundary(v, s, Some(f)).map_err(|e| format!("{name}: {e}"))?;
                    ensure!(listed.contains(x.path()), "{name}: constructed {:?} is not a boundary path", x.path());
                    ensure!(
                        !f.iter().any(|lam| g.has_prefix(x.path(), lam)),
                        "{name}: constructed {:?} has an initial segment in {}",
                        x.path(),
                        u.show(f)
                    );
                    constructions += 1;
                }
            }
            collections += 1;
        }
    }
    Ok(format!("{collections} collections, {constructions} avoiding constructions"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("factorisation uniqueness", factorisation),
        ("extension composes", extension_composes),
        ("matrix units", matrix_units),
        ("satiation against brute force", satiation),
        ("nonzero matrix units", nonzero_units),
        ("faithful on the core", faithful),
        ("shift of gap products", shift_gaps),
        ("gauge compatibility", gauge),
        ("expectation contraction", contraction),
        ("boundary paths exist", boundary_existence),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
