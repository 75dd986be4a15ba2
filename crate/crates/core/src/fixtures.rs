//! Small graphs used by the tests, benches and CLI examples.

use rand::seq::SliceRandom;
use rand::Rng;

pub use crate::boundary::{omega, omega_spec};
use crate::degree::Degree;
use crate::graph::{KGraph, SkeletonSpec};

/// Edge ids in `omega(2, (1,1))`: `a` and `b` leave the origin, `a2` and
/// `b2` arrive at the far corner, and `c = a b2 = b a2`.
pub const OMEGA11_A: &str = "e1_0_0";
pub const OMEGA11_B: &str = "e2_0_0";
pub const OMEGA11_A2: &str = "e1_0_1";
pub const OMEGA11_B2: &str = "e2_1_0";
pub const OMEGA11_C: &str = "e1_0_0.e2_1_0";

pub fn g1_spec() -> SkeletonSpec {
    SkeletonSpec::new(2)
        .vertex("v")
        .edge("b", 1, "v", "v")
        .edge("r", 2, "v", "v")
        .square("b", "r", "r", "b")
}

/// One vertex with a blue loop `b` and a red loop `r`.
pub fn g1() -> KGraph {
    KGraph::new(g1_spec()).expect("valid")
}


/// `omega(2, (1,1))` with the far corner removed: two edges out of the
/// origin and no squares.
pub fn corner_spec() -> SkeletonSpec {
    SkeletonSpec::new(2)
        .vertex("0_0")
        .vertex("1_0")
        .vertex("0_1")
        .edge("e1_0_0", 1, "0_0", "1_0")
        .edge("e2_0_0", 2, "0_0", "0_1")
}

pub fn corner() -> KGraph {
    KGraph::new(corner_spec()).expect("valid")
}

/// Three layers `v0 <- v1 <- v2`, each step a blue and a red edge, with
/// `b0 r1 = r0 b1`. Paths between the same pair of vertices come in
/// several degrees, so some boundary paths are not aperiodic.
pub fn ladder_spec() -> SkeletonSpec {
    SkeletonSpec::new(2)
        .vertex("v0")
        .vertex("v1")
        .vertex("v2")
        .edge("b0", 1, "v0", "v1")
        .edge("r0", 2, "v0", "v1")
        .edge("b1", 1, "v1", "v2")
        .edge("r1", 2, "v1", "v2")
        .square("b0", "r1", "r0", "b1")
}

pub fn ladder() -> KGraph {
    KGraph::new(ladder_spec()).expect("valid")
}

/// A 2-graph with a fork: two blue edges from `u` meet a red square each.
pub fn fork_spec() -> SkeletonSpec {
    SkeletonSpec::new(2)
        .vertex("u")
        .vertex("p")
        .vertex("q")
        .vertex("w")
        .vertex("x")
        .edge("f1", 1, "u", "p")
        .edge("f2", 1, "u", "q")
        .edge("g", 2, "u", "w")
        .edge("h1", 2, "p", "x")
        .edge("h2", 2, "q", "x")
        .edge("k1", 1, "w", "x")
        .edge("k2", 1, "w", "x")
        .square("f1", "h1", "g", "k1")
        .square("f2", "h2", "g", "k2")
}

pub fn fork() -> KGraph {
    KGraph::new(fork_spec()).expect("valid")
}

/// The acyclic graphs used throughout the acceptance suite.
pub fn acyclic_fixtures() -> Vec<(&'static str, KGraph)> {
    vec![
        ("omega_1_(2)", omega(1, &Degree::from([2]))),
        ("omega_1_(3)", omega(1, &Degree::from([3]))),
        ("omega_2_(1,1)", omega(2, &Degree::from([1, 1]))),
        ("omega_2_(2,1)", omega(2, &Degree::from([2, 1]))),
        ("corner", corner()),
        ("ladder", ladder()),
        ("fork", fork()),
    ]
}

/// A random k-graph with at most `max_vertices` vertices, built as a
/// product of random 1-graphs and then, for rank 2, re-wired by a random
/// bijection on each set of bicoloured paths sharing endpoints.
///
/// Rank 3 twists are kept only if they pass validation, so the result is
/// always a valid spec.
pub fn random_spec<R: Rng>(rng: &mut R, rank: usize, max_vertices: usize, acyclic: bool) -> SkeletonSpec {
    assert!(rank >= 1 && max_vertices >= 1);
    let mut sizes = vec![1usize; rank];
    // Grow factor sizes while the product stays within max_vertices.
    for _ in 0..8 {
        let i = rng.gen_range(0..rank);
        let product: usize = sizes.iter().product();
        if product / sizes[i] * (sizes[i] + 1) <= max_vertices {
            sizes[i] += 1;
        }
    }
    // factor[i] = list of (range, source) edges on sizes[i] vertices.
    let factors: Vec<Vec<(usize, usize)>> = sizes
        .iter()
        .map(|&n| {
            let mut edges = Vec::new();
            for r in 0..n {
                for s in 0..n {
                    let allowed = if acyclic { r < s } else { true };
                    if allowed {
                        let copies = match rng.gen_range(0..10) {
                            0..=4 => 0,
                            5..=8 => 1,
                            _ => 2,
                        };
                        for _ in 0..copies {
                            edges.push((r, s));
                        }
                    }
                }
            }
            if edges.is_empty() && n > 1 {
                edges.push((0, 1));
            }
            edges
        })
        .collect();

    let coords: Vec<Vec<usize>> = sizes
        .iter()
        .fold(vec![vec![]], |acc, &n| {
            acc.into_iter()
                .flat_map(|p| {
                    (0..n).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect()
        });
    let vname = |c: &[usize]| format!("v{}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(""));
    let ename = |i: usize, j: usize, c: &[usize]| {
        format!("c{}e{}_{}", i + 1, j, c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(""))
    };

    let mut spec = SkeletonSpec::new(rank);
    for c in &coords {
        spec = spec.vertex(&vname(c));
    }
    // Edge (i, j, base): colour i, factor edge j, other coordinates from base.
    for (i, factor) in factors.iter().enumerate() {
        for (j, &(r, s)) in factor.iter().enumerate() {
            for base in coords.iter().filter(|c| c[i] == r) {
                let mut src = base.clone();
                src[i] = s;
                spec = spec.edge(&ename(i, j, base), i + 1, &vname(base), &vname(&src));
            }
        }
    }
    // Product squares: (colour i edge j at base) then (colour l edge m at base')
    // equals (colour l edge m at base) then (colour i edge j at base'').
    let mut squares = Vec::new();
    for i in 0..rank {
        for l in (i + 1)..rank {
            for (j, &(ri, si)) in factors[i].iter().enumerate() {
                for (m, &(rl, sl)) in factors[l].iter().enumerate() {
                    for base in coords.iter().filter(|c| c[i] == ri && c[l] == rl) {
                        let mut mid_i = base.clone();
                        mid_i[i] = si;
                        let mut mid_l = base.clone();
                        mid_l[l] = sl;
                        squares.push([
                            ename(i, j, base),
                            ename(l, m, &mid_i),
                            ename(l, m, base),
                            ename(i, j, &mid_l),
                        ]);
                    }
                }
            }
        }
    }
    let plain = SkeletonSpec { squares: squares.clone(), ..spec.clone() };

    // Twist: permute the right-hand sides within each class of squares that
    // share a colour pair and endpoints.
    let mut twisted = squares.clone();
    let endpoint_key = |sq: &[String; 4]| {
        let find = |id: &str| spec.edges.iter().find(|e| e.id == id).expect("edge exists").clone();
        let e = find(&sq[0]);
        let f = find(&sq[1]);
        (e.color, f.color, e.range.clone(), f.source.clone())
    };
    let mut classes: std::collections::BTreeMap<_, Vec<usize>> = Default::default();
    for (idx, sq) in squares.iter().enumerate() {
        classes.entry(endpoint_key(sq)).or_default().push(idx);
    }
    for idxs in classes.values() {
        let mut rhs: Vec<(String, String)> =
            idxs.iter().map(|&k| (squares[k][2].clone(), squares[k][3].clone())).collect();
        rhs.shuffle(rng);
        for (&k, (f2, e2)) in idxs.iter().zip(rhs) {
            twisted[k][2] = f2;
            twisted[k][3] = e2;
        }
    }
    let twisted = SkeletonSpec { squares: twisted, ..spec };
    if KGraph::new(twisted.clone()).is_ok() {
        twisted
    } else {
        plain
    }
}
