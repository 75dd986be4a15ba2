//! Satiated collections of finite exhaustive sets.
//!
//! Collections live inside a [`Universe`]: the finite exhaustive vertex-free
//! families of a degree window `v Lambda^{<= D}` at every vertex `v`,
//! optionally capped in size. For an acyclic graph with `D` at least the
//! maximal path degree and no cap the universe is exactly `FE(Lambda)`, and
//! every answer below is exact. Otherwise answers describe the window.

use std::collections::{BTreeMap, BTreeSet};

use crate::alignment::PathFamily;
use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::exhaustive::DEFAULT_SUBSET_BUDGET;
use crate::graph::{KGraph, VertexId};
use crate::path::Path;

/// Degree window and size cap for a [`Universe`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub depth: Degree,
    pub max_size: Option<usize>,
}

impl Window {
    pub fn new(depth: Degree, max_size: Option<usize>) -> Self {
        Window { depth, max_size }
    }
}

/// Largest candidate set per vertex for which an uncapped universe is built.
pub const DEFAULT_UNCAPPED_LIMIT: usize = 20;

/// A finite set of finite exhaustive families.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FamilyCollection {
    members: BTreeSet<PathFamily>,
}

impl FamilyCollection {
    pub fn new(members: impl IntoIterator<Item = PathFamily>) -> Self {
        FamilyCollection { members: members.into_iter().collect() }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn members(&self) -> &BTreeSet<PathFamily> {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = &PathFamily> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, family: &PathFamily) -> bool {
        self.members.contains(family)
    }

    pub fn insert(&mut self, family: PathFamily) -> bool {
        self.members.insert(family)
    }

    pub fn is_subset(&self, other: &FamilyCollection) -> bool {
        self.members.is_subset(&other.members)
    }

    /// `vC`: members with range `v`.
    pub fn at(&self, v: VertexId) -> impl Iterator<Item = &PathFamily> {
        self.members.iter().filter(move |f| f.range() == v)
    }

    /// The inclusion-minimal members.
    pub fn minimal(&self) -> Vec<PathFamily> {
        let all: Vec<PathFamily> = self.members.iter().cloned().collect();
        crate::exhaustive::minimal_elements(&all)
    }
}

impl FromIterator<PathFamily> for FamilyCollection {
    fn from_iter<I: IntoIterator<Item = PathFamily>>(iter: I) -> Self {
        Self::new(iter)
    }
}

/// Answer to a membership query against a satiated collection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

/// The first axiom found to fail, with its witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `g` is a member, `e` is a finite exhaustive superset that is not.
    Superset { g: PathFamily, e: PathFamily },
    /// `g` is a member and `mu` has no prefix in `g`, but `Ext(mu; g)` is not.
    Extension { g: PathFamily, mu: Path, ext: PathFamily },
    /// `g` is a member and `truncated` is a truncation of it that is not.
    Truncation { g: PathFamily, truncated: PathFamily },
    /// `g` is a member and `grafted` is a grafting onto it that is not.
    Grafting { g: PathFamily, grafted: PathFamily },
}

impl Violation {
    pub fn axiom(&self) -> &'static str {
        match self {
            Violation::Superset { .. } => "S1",
            Violation::Extension { .. } => "S2",
            Violation::Truncation { .. } => "S3",
            Violation::Grafting { .. } => "S4",
        }
    }
}

/// Every finite exhaustive vertex-free family inside a window.
#[derive(Clone, Debug)]
pub struct Universe<'g> {
    graph: &'g KGraph,
    window: Window,
    by_vertex: BTreeMap<VertexId, Vec<PathFamily>>,
    paths: BTreeMap<VertexId, Vec<Path>>,
    exact: bool,
}

impl<'g> Universe<'g> {
    /// The universe of an acyclic graph with the full window and no cap,
    /// which is `FE(Lambda)` itself.
    pub fn exact(graph: &'g KGraph) -> Result<Self> {
        let depth = graph
            .max_degree()
            .ok_or(Error::CyclicGraphUnsupported("exact universe"))?
            .clone();
        Self::new(graph, Window::new(depth, None), DEFAULT_SUBSET_BUDGET)
    }

    pub fn new(graph: &'g KGraph, window: Window, budget: usize) -> Result<Self> {
        let mut by_vertex = BTreeMap::new();
        let mut paths = BTreeMap::new();
        for v in graph.vertices() {
            let window_paths = graph.paths_up_to(v, &window.depth);
            let candidates = window_paths.len() - 1;
            let cap = match window.max_size {
                Some(cap) => cap,
                None if candidates > DEFAULT_UNCAPPED_LIMIT => {
                    return Err(Error::UniverseTooLarge {
                        vertex: graph.vertex_name(v).to_string(),
                        candidates,
                        limit: DEFAULT_UNCAPPED_LIMIT,
                    })
                }
                None => candidates,
            };
            let families = graph.fe_enumerate(v, &window.depth, cap, budget).map_err(|e| match e {
                Error::BudgetExceeded { .. } => Error::UniverseTooLarge {
                    vertex: graph.vertex_name(v).to_string(),
                    candidates,
                    limit: budget,
                },
                other => other,
            })?;
            by_vertex.insert(v, families);
            paths.insert(v, window_paths);
        }
        let exact = graph.is_acyclic()
            && graph.max_degree().is_some_and(|m| m.le(&window.depth))
            && window.max_size.is_none_or(|cap| {
                by_vertex.keys().all(|&v| cap + 1 >= paths[&v].len())
            });
        Ok(Universe { graph, window, by_vertex, paths, exact })
    }

    pub fn graph(&self) -> &'g KGraph {
        self.graph
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Whether the universe is all of `FE(Lambda)`.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `v FE` within the window, sorted.
    pub fn at(&self, v: VertexId) -> &[PathFamily] {
        &self.by_vertex[&v]
    }

    /// `v Lambda^{<= D}`, sorted.
    pub fn window_paths(&self, v: VertexId) -> &[Path] {
        &self.paths[&v]
    }

    pub fn contains(&self, family: &PathFamily) -> bool {
        self.by_vertex.get(&family.range()).is_some_and(|fs| fs.binary_search(family).is_ok())
    }

    pub fn len(&self) -> usize {
        self.by_vertex.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &PathFamily> {
        self.by_vertex.values().flatten()
    }

    /// The whole universe as a collection.
    pub fn full(&self) -> FamilyCollection {
        self.iter().cloned().collect()
    }

    /// Builds a collection from families that must lie in the universe.
    pub fn collection(&self, families: impl IntoIterator<Item = PathFamily>) -> Result<FamilyCollection> {
        let c: FamilyCollection = families.into_iter().collect();
        self.check_inside(&c)?;
        Ok(c)
    }

    fn check_inside(&self, c: &FamilyCollection) -> Result<()> {
        match c.iter().find(|f| !self.contains(f)) {
            Some(f) => Err(Error::PreconditionFailed(format!(
                "family {} is not a finite exhaustive vertex-free set inside the window",
                self.show(f)
            ))),
            None => Ok(()),
        }
    }

    /// Renders a family as `{p, q, ...}`.
    pub fn show(&self, family: &PathFamily) -> String {
        show_family(self.graph, family)
    }

    /// `Ext(mu; E)` when it lies in the universe, `None` when it falls
    /// outside an inexact window.
    fn ext_in_universe(&self, mu: &Path, e: &PathFamily) -> Result<Option<PathFamily>> {
        let ext = self.graph.ext(mu, e)?;
        if self.contains(&ext) {
            return Ok(Some(ext));
        }
        if self.exact {
            return Err(Error::InvariantViolated(format!(
                "Ext({}; {}) = {} is not finite exhaustive",
                self.graph.show(mu),
                self.show(e),
                self.show(&ext)
            )));
        }
        Ok(None)
    }

    /// Finite supersets, inside `r(E) Lambda`, of members.
    pub fn sigma1(&self, c: &FamilyCollection) -> Result<FamilyCollection> {
        self.check_inside(c)?;
        let mut out = c.clone();
        for e in c.iter() {
            for f in self.at(e.range()) {
                if e.is_subset(f) {
                    out.insert(f.clone());
                }
            }
        }
        Ok(out)
    }

    /// `Ext(mu; E)` for members `E` and `mu in r(E) Lambda \ E Lambda`.
    pub fn sigma2(&self, c: &FamilyCollection) -> Result<FamilyCollection> {
        self.check_inside(c)?;
        let mut out = c.clone();
        for e in c.iter() {
            for mu in self.window_paths(e.range()) {
                if self.graph.in_family_closure(mu, e.iter()) {
                    continue;
                }
                if let Some(ext) = self.ext_in_universe(mu, e)? {
                    out.insert(ext);
                }
            }
        }
        Ok(out)
    }

    /// Truncations `{lambda(0, n_lambda)}` of members, `0 < n_lambda <= d(lambda)`.
    pub fn sigma3(&self, c: &FamilyCollection) -> Result<FamilyCollection> {
        self.check_inside(c)?;
        let mut out = c.clone();
        for v in self.graph.vertices() {
            let members: Vec<&PathFamily> = c.at(v).collect();
            for t in self.at(v) {
                if !c.contains(t) && members.iter().any(|e| self.is_truncation(t, e)) {
                    out.insert(t.clone());
                }
            }
        }
        Ok(out)
    }

    /// Graftings `(E \ F) u U_{lambda in F} lambda F_lambda` with `E` a member,
    /// `F` a subset of `E` and each `F_lambda` a member at `s(lambda)`.
    pub fn sigma4(&self, c: &FamilyCollection) -> Result<FamilyCollection> {
        self.check_inside(c)?;
        let mut out = c.clone();
        for v in self.graph.vertices() {
            let members: Vec<&PathFamily> = c.at(v).collect();
            for t in self.at(v) {
                if !c.contains(t) && members.iter().any(|e| self.is_grafting(t, e, c)) {
                    out.insert(t.clone());
                }
            }
        }
        Ok(out)
    }

    /// `Sigma = Sigma4 . Sigma3 . Sigma2 . Sigma1`.
    pub fn sigma(&self, c: &FamilyCollection) -> Result<FamilyCollection> {
        self.sigma4(&self.sigma3(&self.sigma2(&self.sigma1(c)?)?)?)
    }

    /// The satiation of `c`: the fixpoint of [`Universe::sigma`].
    pub fn satiate(&self, c: &FamilyCollection) -> Result<FamilyCollection> {
        self.satiate_with_budget(c, self.len() + 2)
    }

    pub fn satiate_with_budget(&self, c: &FamilyCollection, rounds: usize) -> Result<FamilyCollection> {
        let mut current = c.clone();
        for _ in 0..rounds {
            let next = self.sigma(&current)?;
            if next == current {
                return Ok(current);
            }
            current = next;
        }
        Err(Error::FixpointBudgetExceeded(rounds))
    }

    /// The fixpoint reached by applying `Sigma1..Sigma4` one at a time in
    /// round-robin order; it agrees with [`Universe::satiate`].
    pub fn satiate_interleaved(&self, c: &FamilyCollection) -> Result<FamilyCollection> {
        let steps: [fn(&Self, &FamilyCollection) -> Result<FamilyCollection>; 4] =
            [Self::sigma1, Self::sigma2, Self::sigma3, Self::sigma4];
        let mut current = c.clone();
        let mut stable = 0;
        let mut i = 0;
        while stable < 4 {
            let next = steps[i % 4](self, &current)?;
            if next == current {
                stable += 1;
            } else {
                stable = 0;
                current = next;
            }
            i += 1;
        }
        Ok(current)
    }

    pub fn is_satiated(&self, c: &FamilyCollection) -> Result<bool> {
        Ok(self.first_violation(c)?.is_none())
    }

    /// The first failing axiom, checked in the order S1, S2, S3, S4.
    pub fn first_violation(&self, c: &FamilyCollection) -> Result<Option<Violation>> {
        self.check_inside(c)?;
        for g in c.iter() {
            if let Some(e) = self.at(g.range()).iter().find(|e| g.is_subset(e) && !c.contains(e)) {
                return Ok(Some(Violation::Superset { g: g.clone(), e: e.clone() }));
            }
        }
        for g in c.iter() {
            for mu in self.window_paths(g.range()) {
                if self.graph.in_family_closure(mu, g.iter()) {
                    continue;
                }
                if let Some(ext) = self.ext_in_universe(mu, g)? {
                    if !c.contains(&ext) {
                        return Ok(Some(Violation::Extension { g: g.clone(), mu: mu.clone(), ext }));
                    }
                }
            }
        }
        for g in c.iter() {
            if let Some(t) = self.at(g.range()).iter().find(|t| !c.contains(t) && self.is_truncation(t, g)) {
                return Ok(Some(Violation::Truncation { g: g.clone(), truncated: t.clone() }));
            }
        }
        for g in c.iter() {
            if let Some(t) = self.at(g.range()).iter().find(|t| !c.contains(t) && self.is_grafting(t, g, c)) {
                return Ok(Some(Violation::Grafting { g: g.clone(), grafted: t.clone() }));
            }
        }
        Ok(None)
    }

    /// Whether `t = {lambda(0, n_lambda) : lambda in e}` for some choice of
    /// `0 < n_lambda <= d(lambda)`: every member of `e` needs a nonvertex
    /// prefix in `t`, and `t` must be covered by distinct such choices.
    pub fn is_truncation(&self, t: &PathFamily, e: &PathFamily) -> bool {
        if t.range() != e.range() || t.len() > e.len() || t.has_vertex() {
            return false;
        }
        let es: Vec<&Path> = e.iter().collect();
        let ts: Vec<&Path> = t.iter().collect();
        let adj: Vec<Vec<usize>> = ts
            .iter()
            .map(|tau| (0..es.len()).filter(|&j| self.graph.has_prefix(es[j], tau)).collect())
            .collect();
        let every_member_truncates =
            (0..es.len()).all(|j| adj.iter().any(|row| row.contains(&j)));
        every_member_truncates && has_saturating_matching(&adj, es.len())
    }

    /// Whether `t` is a grafting `(e \ F) u U lambda F_lambda` with each
    /// `F_lambda` a member of `c` at `s(lambda)`.
    pub fn is_grafting(&self, t: &PathFamily, e: &PathFamily, c: &FamilyCollection) -> bool {
        if t.range() != e.range() {
            return false;
        }
        let es: Vec<&Path> = e.iter().collect();
        // For each lambda, the grafts that stay inside t.
        let options: Vec<Vec<BTreeSet<Path>>> = es
            .iter()
            .map(|lam| {
                c.at(lam.source())
                    .filter_map(|f| {
                        let grafted: BTreeSet<Path> = f
                            .iter()
                            .map(|beta| self.graph.compose(lam, beta).expect("s(lambda) = r(F)"))
                            .collect();
                        grafted.iter().all(|p| t.contains(p)).then_some(grafted)
                    })
                    .collect()
            })
            .collect();
        let mut covered = BTreeSet::new();
        graft_search(&es, &options, t, 0, &mut covered)
    }

    /// Membership of `f` in the satiated collection `s`.
    pub fn member(&self, f: &PathFamily, s: &FamilyCollection) -> Membership {
        if f.has_vertex() || f.is_empty() {
            return Membership::No;
        }
        if s.contains(f) || s.at(f.range()).any(|e| e.is_subset(f)) {
            return Membership::Yes;
        }
        let verdict = self.graph.is_exhaustive(f, Some(&self.window.depth));
        if verdict.status == crate::exhaustive::ExhaustiveStatus::NotExhaustive {
            return Membership::No;
        }
        if self.exact {
            Membership::No
        } else {
            Membership::Unknown
        }
    }

    /// Membership of `f` in the satiation of `generators`.
    pub fn member_of_satiation(&self, f: &PathFamily, generators: &FamilyCollection) -> Result<Membership> {
        Ok(self.member(f, &self.satiate(generators)?))
    }
}

fn graft_search(
    es: &[&Path],
    options: &[Vec<BTreeSet<Path>>],
    t: &PathFamily,
    idx: usize,
    covered: &mut BTreeSet<Path>,
) -> bool {
    if idx == es.len() {
        return covered.len() == t.len();
    }
    let lam = es[idx];
    if t.contains(lam) {
        let fresh = covered.insert(lam.clone());
        if graft_search(es, options, t, idx + 1, covered) {
            return true;
        }
        if fresh {
            covered.remove(lam);
        }
    }
    for grafted in &options[idx] {
        let fresh: Vec<Path> = grafted.iter().filter(|p| !covered.contains(*p)).cloned().collect();
        covered.extend(fresh.iter().cloned());
        if graft_search(es, options, t, idx + 1, covered) {
            return true;
        }
        for p in &fresh {
            covered.remove(p);
        }
    }
    false
}

/// Whether the bipartite graph `left -> right` has a matching covering
/// every left vertex (Kuhn's augmenting paths).
fn has_saturating_matching(adj: &[Vec<usize>], right: usize) -> bool {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &w in &adj[u] {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            if owner[w].is_none_or(|o| augment(o, adj, seen, owner)) {
                owner[w] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right];
    (0..adj.len()).all(|u| augment(u, adj, &mut vec![false; right], &mut owner))
}

/// Renders a family as `{p, q, ...}` using path words.
pub fn show_family(g: &KGraph, family: &PathFamily) -> String {
    let items: Vec<String> = family.iter().map(|p| g.show(p).to_string()).collect();
    format!("{{{}}}", items.join(", "))
}
