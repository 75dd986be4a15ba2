//! Boundary paths compatible with a satiated collection, and aperiodicity.
//!
//! For a finite (acyclic) graph every boundary path is an ordinary path
//! `x`, and `x` is compatible with a satiated collection `S` when for each
//! `n <= d(x)` and each `E in S` with `r(E) = x(n)` some `lambda in E`
//! satisfies `x(n, n + d(lambda)) = lambda`.

use std::collections::{BTreeMap, BTreeSet};

use crate::alignment::PathFamily;
use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::exhaustive::ExhaustiveStatus;
use crate::graph::{KGraph, SkeletonSpec, VertexId};
use crate::path::Path;
use crate::satiation::{FamilyCollection, Membership, Universe};

/// Spec of the k-graph `Omega_{k,m}`: vertices `n <= m`, and an edge of
/// colour `i` with range `n` and source `n + e_i` whenever `n + e_i <= m`.
///
/// Vertex `n` is named by its coordinates joined with `_`; the colour-`i`
/// edge with range `n` is `e{i}_{n}`.
pub fn omega_spec(k: usize, m: &Degree) -> SkeletonSpec {
    assert_eq!(m.rank(), k, "degree has the wrong rank");
    let name = |n: &Degree| n.coords().iter().map(u32::to_string).collect::<Vec<_>>().join("_");
    let edge = |i: usize, n: &Degree| format!("e{}_{}", i + 1, name(n));
    let points = m.box_below();
    let mut spec = SkeletonSpec::new(k);
    for n in &points {
        spec = spec.vertex(&name(n));
    }
    for n in &points {
        for i in 0..k {
            let next = n + &Degree::unit(k, i);
            if next.le(m) {
                spec = spec.edge(&edge(i, n), i + 1, &name(n), &name(&next));
            }
        }
    }
    for n in &points {
        for i in 0..k {
            for j in (i + 1)..k {
                let ni = n + &Degree::unit(k, i);
                let nj = n + &Degree::unit(k, j);
                let corner = &ni + &Degree::unit(k, j);
                if corner.le(m) {
                    spec = spec.square(&edge(i, n), &edge(j, &ni), &edge(j, n), &edge(i, &nj));
                }
            }
        }
    }
    spec
}

/// The k-graph `Omega_{k,m}`.
pub fn omega(k: usize, m: &Degree) -> KGraph {
    KGraph::new(omega_spec(k, m)).expect("Omega graphs are valid")
}

/// Position of `(m, n)` in the diagonal listing of pairs of positive
/// integers: `(m + n - 1)(m + n - 2)/2 + m`.
pub fn position(m: u64, n: u64) -> Result<u64> {
    if m == 0 || n == 0 {
        return Err(Error::DomainError);
    }
    let d = m + n;
    Ok((d - 1) * (d - 2) / 2 + m)
}

/// Inverse of [`position`].
pub fn position_inverse(l: u64) -> Result<(u64, u64)> {
    if l == 0 {
        return Err(Error::DomainError);
    }
    // Diagonal t holds pairs with m + n = t + 1 at positions after T(t-1).
    let mut t = 1u64;
    while t * (t + 1) / 2 < l {
        t += 1;
    }
    let m = l - (t - 1) * t / 2;
    Ok((m, t + 1 - m))
}

/// The diagonal listing `l -> (i_l, j_l)` as an iterator starting at `l = 1`.
#[derive(Clone, Debug, Default)]
pub struct DiagonalListing {
    next: u64,
}

impl Iterator for DiagonalListing {
    type Item = (u64, u64);

    fn next(&mut self) -> Option<(u64, u64)> {
        self.next += 1;
        position_inverse(self.next).ok()
    }
}

/// A path verified to be a boundary path for some satiated collection.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryPath {
    path: Path,
}

impl BoundaryPath {
    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn degree(&self) -> &Degree {
        self.path.degree()
    }

    pub fn range(&self) -> VertexId {
        self.path.range()
    }

    pub fn into_path(self) -> Path {
        self.path
    }
}

/// Outcome of the condition (C) search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionCReport {
    /// Aperiodic boundary witnesses, keyed by vertex and the avoided family
    /// (`None` for the plain nonemptiness requirement).
    pub witnesses: BTreeMap<(VertexId, Option<PathFamily>), Path>,
    /// Requirements with no aperiodic witness.
    pub failures: Vec<(VertexId, Option<PathFamily>)>,
}

impl ConditionCReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Step cap for [`Universe::construct_boundary`].
pub const DEFAULT_CONSTRUCTION_STEPS: u64 = 1_000_000;

impl Universe<'_> {
    fn require_exact(&self, what: &'static str) -> Result<()> {
        if self.is_exact() {
            Ok(())
        } else {
            Err(Error::InexactUniverse(what))
        }
    }

    /// Whether `x` is a boundary path for the satiated collection `s`,
    /// testing only the inclusion-minimal members of `s` (enough, since
    /// `s` is closed under finite exhaustive supersets).
    pub fn is_boundary(&self, s: &FamilyCollection, x: &Path) -> Result<bool> {
        self.require_exact("is_boundary")?;
        Ok(self.passes_through(x, &s.minimal()))
    }

    /// [`Universe::is_boundary`] checking every member of `s`.
    pub fn is_boundary_full(&self, s: &FamilyCollection, x: &Path) -> Result<bool> {
        self.require_exact("is_boundary")?;
        let all: Vec<PathFamily> = s.iter().cloned().collect();
        Ok(self.passes_through(x, &all))
    }

    /// Three-valued boundary test for windowed collections: `Some(false)`
    /// when a window member is missed, `None` when every window member is
    /// met but members beyond the window cannot be ruled out.
    pub fn is_boundary_windowed(&self, s: &FamilyCollection, x: &Path) -> Option<bool> {
        let all: Vec<PathFamily> = s.iter().cloned().collect();
        if !self.passes_through(x, &all) {
            Some(false)
        } else if self.is_exact() {
            Some(true)
        } else {
            None
        }
    }

    fn passes_through(&self, x: &Path, families: &[PathFamily]) -> bool {
        let g = self.graph();
        x.degree().box_below().iter().all(|n| {
            let tail = g.segment(x, n, x.degree()).expect("n <= d(x)");
            families
                .iter()
                .filter(|e| e.range() == tail.range())
                .all(|e| e.iter().any(|lam| g.has_prefix(&tail, lam)))
        })
    }

    /// Every boundary path with range `v`, sorted. Nonempty for satiated `s`.
    pub fn boundary_paths(&self, v: VertexId, s: &FamilyCollection) -> Result<Vec<BoundaryPath>> {
        self.require_exact("boundary_paths")?;
        let g = self.graph();
        let minimal = s.minimal();
        let found: Vec<BoundaryPath> = g
            .paths_from(v)?
            .into_iter()
            .filter(|x| self.passes_through(x, &minimal))
            .map(|path| BoundaryPath { path })
            .collect();
        if found.is_empty() {
            return Err(Error::InvariantViolated(format!(
                "no boundary path at {}",
                g.vertex_name(v)
            )));
        }
        Ok(found)
    }

    /// All boundary paths, sorted.
    pub fn all_boundary_paths(&self, s: &FamilyCollection) -> Result<Vec<BoundaryPath>> {
        let mut all = Vec::new();
        for v in self.graph().vertices() {
            all.extend(self.boundary_paths(v, s)?);
        }
        all.sort();
        Ok(all)
    }

    /// Wraps `x` after checking it is a boundary path.
    pub fn boundary_path(&self, s: &FamilyCollection, x: Path) -> Result<Option<BoundaryPath>> {
        Ok(self.is_boundary(s, &x)?.then_some(BoundaryPath { path: x }))
    }

    /// `lambda x`, checked to be a boundary path again.
    pub fn extend(&self, s: &FamilyCollection, lambda: &Path, x: &BoundaryPath) -> Result<BoundaryPath> {
        let path = self.graph().compose(lambda, &x.path)?;
        self.still_boundary(s, path)
    }

    /// `x(n, d(x))`, checked to be a boundary path again.
    pub fn restrict(&self, s: &FamilyCollection, x: &BoundaryPath, n: &Degree) -> Result<BoundaryPath> {
        let path = self.graph().segment(&x.path, n, x.degree())?;
        self.still_boundary(s, path)
    }

    fn still_boundary(&self, s: &FamilyCollection, path: Path) -> Result<BoundaryPath> {
        if self.is_boundary(s, &path)? {
            Ok(BoundaryPath { path })
        } else {
            Err(Error::InvariantViolated(format!(
                "{} is not a boundary path",
                self.graph().show(&path)
            )))
        }
    }

    /// Builds a boundary path at `v` step by step, serving the obligation
    /// `(i_l, j_l)` of the diagonal listing at step `l`: the part of the
    /// current path after `lambda_{i_l}` must eventually pass through the
    /// `j_l`-th member of `s(lambda_{i_l}) S` in canonical order.
    ///
    /// With `avoid = Some(F)`, `F` must be finite exhaustive and outside
    /// `s`, and every extension keeps `Ext(lambda_l; F)` outside `s`, so the
    /// result has no initial segment in `F`. Choices are resolved in
    /// canonical path order.
    pub fn construct_boundary(
        &self,
        v: VertexId,
        s: &FamilyCollection,
        avoid: Option<&PathFamily>,
    ) -> Result<BoundaryPath> {
        self.construct_boundary_with_budget(v, s, avoid, DEFAULT_CONSTRUCTION_STEPS)
    }

    pub fn construct_boundary_with_budget(
        &self,
        v: VertexId,
        s: &FamilyCollection,
        avoid: Option<&PathFamily>,
        max_steps: u64,
    ) -> Result<BoundaryPath> {
        self.require_exact("construct_boundary")?;
        let g = self.graph();
        if let Some(f) = avoid {
            if f.range() != v {
                return Err(Error::RangeMismatch(self.show(f)));
            }
            if f.has_vertex() || g.is_exhaustive(f, None).status != ExhaustiveStatus::Exhaustive {
                return Err(Error::PreconditionFailed(format!(
                    "{} is not finite exhaustive",
                    self.show(f)
                )));
            }
            if self.member(f, s) != Membership::No {
                return Err(Error::PreconditionFailed(format!(
                    "{} belongs to the satiated collection",
                    self.show(f)
                )));
            }
        }
        let listing = |w: VertexId| -> Vec<PathFamily> { s.at(w).cloned().collect() };

        // lambdas[l - 1] is lambda_l; listings are recomputed from s(lambda_l).
        let mut lambdas: Vec<Path> = vec![g.vertex_path(v)];
        let mut listings: Vec<Vec<PathFamily>> = vec![listing(v)];
        for (step, (i, j)) in DiagonalListing::default().enumerate() {
            let l = step + 1;
            if step as u64 >= max_steps {
                return Err(Error::BudgetExceeded { what: "construction steps".into(), budget: max_steps as usize });
            }
            let current = lambdas[l - 1].clone();
            let (i, j) = (i as usize, j as usize);
            let mut next = current.clone();
            if let Some(target) = listings[i - 1].get(j - 1) {
                let base = &lambdas[i - 1];
                let tail = g.segment(&current, base.degree(), current.degree())?;
                if !g.in_family_closure(&tail, target.iter()) {
                    let options = g.ext(&tail, target)?;
                    let nu = self.choose_extension(&current, &options, avoid, s)?;
                    next = g.compose(&current, &nu)?;
                }
            }
            lambdas.push(next.clone());
            listings.push(listing(next.source()));
            if listings[l].is_empty() && self.obligations_met(&lambdas, &listings) {
                let x = lambdas.pop().expect("nonempty");
                let done = self.still_boundary(s, x)?;
                if let Some(f) = avoid {
                    if g.in_family_closure(done.path(), f.iter()) {
                        return Err(Error::InvariantViolated(format!(
                            "constructed path {} has a prefix in {}",
                            g.show(done.path()),
                            self.show(f)
                        )));
                    }
                }
                return Ok(done);
            }
        }
        unreachable!("the diagonal listing is infinite")
    }

    fn choose_extension(
        &self,
        current: &Path,
        options: &PathFamily,
        avoid: Option<&PathFamily>,
        s: &FamilyCollection,
    ) -> Result<Path> {
        let g = self.graph();
        let Some(f) = avoid else {
            return options
                .iter()
                .next()
                .cloned()
                .ok_or_else(|| Error::InvariantViolated("empty extension set".into()));
        };
        let f_l = g.ext(current, f)?;
        options
            .iter()
            .find(|alpha| {
                !g.in_family_closure(alpha, f_l.iter())
                    && g.ext(alpha, &f_l).is_ok_and(|e| self.member(&e, s) == Membership::No)
            })
            .cloned()
            .ok_or_else(|| {
                Error::InvariantViolated(format!(
                    "no extension of {} keeps Ext(.; {}) outside the collection",
                    g.show(current),
                    self.show(f)
                ))
            })
    }

    /// Whether every obligation `(i, j)` with `i <= l` and `j` within the
    /// listing is met by the last path.
    fn obligations_met(&self, lambdas: &[Path], listings: &[Vec<PathFamily>]) -> bool {
        let g = self.graph();
        let last = lambdas.last().expect("nonempty");
        lambdas.iter().zip(listings).all(|(base, listing)| {
            let tail = g.segment(last, base.degree(), last.degree()).expect("prefix");
            listing.iter().all(|e| g.in_family_closure(&tail, e.iter()))
        })
    }

    /// Condition (C): an aperiodic boundary path at every vertex, and for
    /// every finite exhaustive `F` outside `s`, an aperiodic boundary path
    /// with no initial segment in `F`.
    pub fn condition_c(&self, s: &FamilyCollection) -> Result<ConditionCReport> {
        self.require_exact("condition_c")?;
        let g = self.graph();
        let mut report = ConditionCReport::default();
        for v in g.vertices() {
            let mut aperiodic = Vec::new();
            for x in self.boundary_paths(v, s)? {
                if g.is_aperiodic_path(x.path())? {
                    aperiodic.push(x.into_path());
                }
            }
            let mut requirements: Vec<Option<PathFamily>> = vec![None];
            requirements.extend(self.at(v).iter().filter(|f| !s.contains(f)).cloned().map(Some));
            for req in requirements {
                let witness = aperiodic
                    .iter()
                    .find(|x| req.as_ref().is_none_or(|f| !g.in_family_closure(x, f.iter())));
                match witness {
                    Some(x) => {
                        report.witnesses.insert((v, req), x.clone());
                    }
                    None => report.failures.push((v, req)),
                }
            }
        }
        Ok(report)
    }
}

impl KGraph {
    /// Common extensions of `x` and `y` of degree `d(x) v d(y)`, found by
    /// extending `x` and keeping the extensions that begin with `y`.
    pub fn mce_morphisms(&self, x: &Path, y: &Path) -> BTreeSet<Path> {
        if x.range() != y.range() {
            return BTreeSet::new();
        }
        let top = x.degree().join(y.degree());
        let rest = top.checked_sub(x.degree()).expect("join dominates");
        self.paths(x.source(), &rest)
            .iter()
            .map(|tail| self.compose(x, tail).expect("composable"))
            .filter(|z| self.has_prefix(z, y))
            .collect()
    }

    /// Whether `MCE(lambda x, mu x)` is empty for all distinct `lambda, mu`
    /// with source `r(x)`.
    pub fn is_aperiodic_path(&self, x: &Path) -> Result<bool> {
        let into = self.paths_into(x.range())?;
        Ok(self.first_periodic_pair(x, &into).is_none())
    }

    /// [`KGraph::is_aperiodic_path`] for any graph, searching `lambda, mu`
    /// of degree at most `bound`: `Some(false)` on finding a pair with a
    /// common extension, `None` otherwise.
    pub fn is_aperiodic_path_bounded(&self, x: &Path, bound: &Degree) -> Option<bool> {
        if self.is_acyclic() {
            return self.is_aperiodic_path(x).ok();
        }
        let into: Vec<Path> = self
            .vertices()
            .flat_map(|w| self.paths_up_to(w, bound))
            .filter(|p| p.source() == x.range())
            .collect();
        self.first_periodic_pair(x, &into).map(|_| false)
    }

    fn first_periodic_pair(&self, x: &Path, into: &[Path]) -> Option<(Path, Path)> {
        let extended: Vec<Path> = into.iter().map(|l| self.compose(l, x).expect("s(l) = r(x)")).collect();
        for (i, lx) in extended.iter().enumerate() {
            for (j, mx) in extended.iter().enumerate().skip(i + 1) {
                if !self.mce_morphisms(lx, mx).is_empty() {
                    return Some((into[i].clone(), into[j].clone()));
                }
            }
        }
        None
    }

    /// The first `n <= d(x)`, in graded order, with
    /// `Lambda_min(lambda x(0,n), mu x(0,n))` empty.
    pub fn separation_degree(&self, x: &Path, lambda: &Path, mu: &Path) -> Result<Degree> {
        if lambda == mu || lambda.source() != x.range() || mu.source() != x.range() {
            return Err(Error::PreconditionFailed(
                "separation needs distinct paths with source r(x)".into(),
            ));
        }
        for n in x.degree().box_below() {
            let head = self.segment(x, &Degree::zero(self.rank()), &n)?;
            let l = self.compose(lambda, &head)?;
            let m = self.compose(mu, &head)?;
            if self.lambda_min(&l, &m).is_empty() {
                return Ok(n);
            }
        }
        Err(Error::NoSeparation { lambda: self.show(lambda).to_string(), mu: self.show(mu).to_string() })
    }
}
