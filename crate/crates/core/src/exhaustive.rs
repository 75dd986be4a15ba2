//! Exhaustiveness of finite path families.
//!
//! `E` is exhaustive when every `lambda in r(E) Lambda` has `Ext(lambda; E)`
//! nonempty. The quantifier ranges over an infinite set when the graph has
//! cycles, so verdicts are three-valued: a definite answer is given only
//! when the graph is acyclic below `r(E)`, when it has no sources below
//! `r(E)`, or when a counterexample turns up in a bounded search.

use rayon::prelude::*;

use crate::alignment::PathFamily;
use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::graph::{KGraph, VertexId};
use crate::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExhaustiveStatus {
    Exhaustive,
    NotExhaustive,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveVerdict {
    pub status: ExhaustiveStatus,
    /// A path `lambda` with `Ext(lambda; E)` empty; present iff the status
    /// is `NotExhaustive`.
    pub witness: Option<Path>,
    /// The degree bound the verdict was established up to.
    pub searched_depth: Degree,
}

impl ExhaustiveVerdict {
    pub fn is_exhaustive(&self) -> bool {
        self.status == ExhaustiveStatus::Exhaustive
    }
}

/// Default subset budget for [`KGraph::fe_enumerate`].
pub const DEFAULT_SUBSET_BUDGET: usize = 1 << 22;

impl KGraph {
    /// Decides whether `family` is exhaustive at its range.
    ///
    /// `depth` bounds the fallback search and defaults to
    /// `(join of member degrees) + (1, ..., 1)`.
    pub fn is_exhaustive(&self, family: &PathFamily, depth: Option<&Degree>) -> ExhaustiveVerdict {
        let v = family.range();
        if family.is_empty() {
            return ExhaustiveVerdict {
                status: ExhaustiveStatus::NotExhaustive,
                witness: Some(self.vertex_path(v)),
                searched_depth: Degree::zero(self.rank()),
            };
        }
        let top = family
            .iter()
            .fold(Degree::zero(self.rank()), |acc, mu| acc.join(mu.degree()));

        if let Some(max) = self.max_degree() {
            let witness = self.paths_up_to(v, max).into_iter().find(|lam| !self.meets(lam, family));
            return verdict_from(witness, ExhaustiveStatus::Exhaustive, max.clone());
        }
        if self.source_free_from(v) {
            // Every path extends to degree >= top, and for d(x) = top the
            // path x is in MCE(x, mu) exactly when mu is a prefix of x.
            let witness = self
                .paths(v, &top)
                .into_iter()
                .find(|x| !family.iter().any(|mu| self.has_prefix(x, mu)));
            return verdict_from(witness, ExhaustiveStatus::Exhaustive, top);
        }
        let bound = match depth {
            Some(d) => d.clone(),
            None => &top + &Degree::splat(self.rank(), 1),
        };
        let witness = self.paths_up_to(v, &bound).into_iter().find(|lam| !self.meets(lam, family));
        verdict_from(witness, ExhaustiveStatus::Unknown, bound)
    }

    /// Whether `Ext(lambda; E)` is nonempty.
    fn meets(&self, lambda: &Path, family: &PathFamily) -> bool {
        family.iter().any(|nu| !self.mce(lambda, nu).is_empty())
    }

    /// Finite exhaustive vertex-free families at `v` inside the window
    /// `v Lambda^{<= depth}`, of at most `max_size` members, sorted.
    pub fn fe_enumerate(
        &self,
        v: VertexId,
        depth: &Degree,
        max_size: usize,
        budget: usize,
    ) -> Result<Vec<PathFamily>> {
        let candidates: Vec<Path> =
            self.paths_up_to(v, depth).into_iter().filter(|p| !p.is_vertex()).collect();
        let n = candidates.len();
        let max_size = max_size.min(n);
        let total = subset_count(n, max_size);
        if total > budget as u128 {
            return Err(Error::BudgetExceeded { what: "candidate subsets".into(), budget });
        }

        // With a finite category each test path meets a fixed set of
        // candidates, so exhaustiveness is a hitting-set condition.
        let tests: Option<Vec<Bits>> = self.max_degree().map(|max| {
            self.paths_up_to(v, max)
                .iter()
                .map(|lam| {
                    let mut bits = Bits::new(n);
                    for (i, nu) in candidates.iter().enumerate() {
                        if !self.mce(lam, nu).is_empty() {
                            bits.set(i);
                        }
                    }
                    bits
                })
                .collect()
        });

        let firsts: Vec<usize> = (0..n).collect();
        let mut found: Vec<PathFamily> = firsts
            .par_iter()
            .flat_map_iter(|&first| {
                let mut out = Vec::new();
                let mut chosen = vec![first];
                let mut bits = Bits::new(n);
                bits.set(first);
                self.grow_subsets(&candidates, tests.as_deref(), v, &mut chosen, &mut bits, max_size, &mut out);
                out
            })
            .collect();
        found.sort();
        found.dedup();
        Ok(found)
    }

    #[allow(clippy::too_many_arguments)]
    fn grow_subsets(
        &self,
        candidates: &[Path],
        tests: Option<&[Bits]>,
        v: VertexId,
        chosen: &mut Vec<usize>,
        bits: &mut Bits,
        max_size: usize,
        out: &mut Vec<PathFamily>,
    ) {
        let exhaustive = match tests {
            Some(tests) => tests.iter().all(|t| t.intersects(bits)),
            None => {
                let family = PathFamily::new(v, chosen.iter().map(|&i| candidates[i].clone()))
                    .expect("common range");
                self.is_exhaustive(&family, None).is_exhaustive()
            }
        };
        if exhaustive {
            out.push(PathFamily::new(v, chosen.iter().map(|&i| candidates[i].clone())).expect("common range"));
        }
        if chosen.len() == max_size {
            return;
        }
        let last = *chosen.last().expect("nonempty");
        for next in (last + 1)..candidates.len() {
            chosen.push(next);
            bits.set(next);
            self.grow_subsets(candidates, tests, v, chosen, bits, max_size, out);
            bits.clear(next);
            chosen.pop();
        }
    }

    /// The inclusion-minimal families among [`KGraph::fe_enumerate`]'s output.
    pub fn minimal_exhaustive(
        &self,
        v: VertexId,
        depth: &Degree,
        max_size: usize,
        budget: usize,
    ) -> Result<Vec<PathFamily>> {
        Ok(minimal_elements(&self.fe_enumerate(v, depth, max_size, budget)?))
    }
}

/// The inclusion-minimal members of `families`, in input order.
pub fn minimal_elements(families: &[PathFamily]) -> Vec<PathFamily> {
    families
        .iter()
        .filter(|f| {
            !families
                .iter()
                .any(|g| g.range() == f.range() && g.len() < f.len() && g.is_subset(f))
        })
        .cloned()
        .collect()
}

fn verdict_from(witness: Option<Path>, otherwise: ExhaustiveStatus, searched_depth: Degree) -> ExhaustiveVerdict {
    match witness {
        Some(w) => ExhaustiveVerdict {
            status: ExhaustiveStatus::NotExhaustive,
            witness: Some(w),
            searched_depth,
        },
        None => ExhaustiveVerdict { status: otherwise, witness: None, searched_depth },
    }
}

fn subset_count(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for i in 1..=k {
        binom = binom * (n - i + 1) as u128 / i as u128;
        total += binom;
    }
    total
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn intersects(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }
}
