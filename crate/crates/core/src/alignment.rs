//! Minimal common extensions and the sets built from them.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{KGraph, VertexId};
use crate::path::Path;

/// A pair `(alpha, beta)` with `mu alpha = nu beta` a minimal common
/// extension of the `(mu, nu)` it was computed from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MinPair {
    pub alpha: Path,
    pub beta: Path,
}

/// A finite set of paths sharing a range vertex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathFamily {
    range: VertexId,
    members: BTreeSet<Path>,
}

impl PathFamily {
    pub fn empty(range: VertexId) -> Self {
        PathFamily { range, members: BTreeSet::new() }
    }

    /// Collects `members`, which must all have range `range`.
    pub fn new(range: VertexId, members: impl IntoIterator<Item = Path>) -> Result<Self> {
        let members: BTreeSet<Path> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|p| p.range() != range) {
            return Err(Error::RangeMismatch(format!("{bad:?}")));
        }
        Ok(PathFamily { range, members })
    }

    /// Infers the range from the first member.
    pub fn from_paths(members: impl IntoIterator<Item = Path>) -> Result<Self> {
        let members: BTreeSet<Path> = members.into_iter().collect();
        let range = members
            .first()
            .map(Path::range)
            .ok_or_else(|| Error::PreconditionFailed("cannot infer the range of an empty family".into()))?;
        PathFamily::new(range, members)
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn members(&self) -> &BTreeSet<Path> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &Path) -> bool {
        self.members.contains(p)
    }

    pub fn has_vertex(&self) -> bool {
        self.members.iter().any(Path::is_vertex)
    }

    pub fn is_subset(&self, other: &PathFamily) -> bool {
        self.range == other.range && self.members.is_subset(&other.members)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Path> {
        self.members.iter()
    }
}

impl std::fmt::Debug for PathFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "v{}:{:?}", self.range.0, self.members)
    }
}

impl KGraph {
    /// `MCE(mu, nu)`: paths of degree `d(mu) v d(nu)` with both as prefixes.
    pub fn mce(&self, mu: &Path, nu: &Path) -> BTreeSet<Path> {
        if mu.range() != nu.range() {
            return BTreeSet::new();
        }
        let top = mu.degree().join(nu.degree());
        let found: BTreeSet<Path> = self
            .paths(mu.range(), &top)
            .into_iter()
            .filter(|lam| {
                self.segment(lam, &zero(self), mu.degree()).as_ref() == Ok(mu)
                    && self.segment(lam, &zero(self), nu.degree()).as_ref() == Ok(nu)
            })
            .collect();
        found
    }

    /// `Lambda_min(mu, nu)`.
    pub fn lambda_min(&self, mu: &Path, nu: &Path) -> BTreeSet<MinPair> {
        self.mce(mu, nu)
            .into_iter()
            .map(|lam| {
                let top = lam.degree().clone();
                MinPair {
                    alpha: self.segment(&lam, mu.degree(), &top).expect("mu <= lam"),
                    beta: self.segment(&lam, nu.degree(), &top).expect("nu <= lam"),
                }
            })
            .collect()
    }

    /// `Ext(mu; E)`; members of `E` with a different range contribute nothing.
    pub fn ext_of<'a>(&self, mu: &Path, family: impl IntoIterator<Item = &'a Path>) -> BTreeSet<Path> {
        let mut out = BTreeSet::new();
        for nu in family {
            for pair in self.lambda_min(mu, nu) {
                out.insert(pair.alpha);
            }
        }
        out
    }

    /// `Ext(mu; E)` as a family at `s(mu)`.
    pub fn ext(&self, mu: &Path, family: &PathFamily) -> Result<PathFamily> {
        if family.range() != mu.range() {
            return Err(Error::RangeMismatch(self.vertex_name(family.range()).to_string()));
        }
        Ok(PathFamily { range: mu.source(), members: self.ext_of(mu, family.iter()) })
    }

    /// Whether `mu` has an initial segment in `family` (`mu in E Lambda`).
    pub fn in_family_closure<'a>(&self, mu: &Path, family: impl IntoIterator<Item = &'a Path>) -> bool {
        family.into_iter().any(|lam| self.has_prefix(mu, lam))
    }

    /// `Pi E`: the least superset of `seed` closed under
    /// `lambda, mu, sigma in G, d(lambda) = d(mu), s(lambda) = s(mu)
    ///  => lambda Ext(mu; {sigma}) in G`.
    pub fn pi_closure(&self, seed: &BTreeSet<Path>, budget: usize) -> Result<BTreeSet<Path>> {
        let mut closed: BTreeSet<Path> = seed.clone();
        let mut steps = 0usize;
        loop {
            let members: Vec<Path> = closed.iter().cloned().collect();
            let mut fresh = Vec::new();
            for lam in &members {
                for mu in members.iter().filter(|mu| {
                    mu.degree() == lam.degree() && mu.source() == lam.source()
                }) {
                    for sigma in &members {
                        steps += 1;
                        if steps > budget {
                            return Err(Error::ClosureBudgetExceeded(budget));
                        }
                        for alpha in self.ext_of(mu, std::iter::once(sigma)) {
                            let joined = self.compose(lam, &alpha).expect("s(lam) = s(mu) = r(alpha)");
                            if !closed.contains(&joined) {
                                fresh.push(joined);
                            }
                        }
                    }
                }
            }
            if fresh.is_empty() {
                return Ok(closed);
            }
            closed.extend(fresh);
        }
    }

    /// `G x_{d,s} G`.
    pub fn pairs_ds(&self, set: &BTreeSet<Path>) -> BTreeSet<(Path, Path)> {
        let mut out = BTreeSet::new();
        for lam in set {
            for mu in set {
                if lam.degree() == mu.degree() && lam.source() == mu.source() {
                    out.insert((lam.clone(), mu.clone()));
                }
            }
        }
        out
    }
}

fn zero(g: &KGraph) -> crate::degree::Degree {
    crate::degree::Degree::zero(g.rank())
}

/// Default step budget for [`KGraph::pi_closure`].
pub const DEFAULT_CLOSURE_BUDGET: usize = 5_000_000;
