//! Finite k-graphs presented by a coloured skeleton and factorisation squares.
//!
//! A [`SkeletonSpec`] lists vertices, coloured edges and, for every pair of
//! composable edges of distinct colours, the square identifying `e f` with
//! `f' e'`. [`KGraph::new`] checks that the squares form a bijection on
//! bicoloured paths of length two and, for rank at least three, that the
//! three-colour associativity condition holds. Under those conditions every
//! edge word has a unique colour-sorted normal form, which is how [`Path`]
//! values are stored.
//!
//! [`Path`]: crate::path::Path

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::path::Path;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpec {
    pub id: String,
    /// 1-based colour.
    pub color: usize,
    pub range: String,
    pub source: String,
}

/// Unvalidated description of a k-graph.
///
/// Each square `[e, f, f2, e2]` states that the path `e` then `f` equals the
/// path `f2` then `e2`, where `e`, `e2` share one colour and `f`, `f2` another.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SkeletonSpec {
    pub rank: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    pub squares: Vec<[String; 4]>,
}

impl SkeletonSpec {
    pub fn new(rank: usize) -> Self {
        SkeletonSpec { rank, ..Default::default() }
    }

    pub fn vertex(mut self, id: &str) -> Self {
        self.vertices.push(id.to_string());
        self
    }

    pub fn edge(mut self, id: &str, color: usize, range: &str, source: &str) -> Self {
        self.edges.push(EdgeSpec {
            id: id.to_string(),
            color,
            range: range.to_string(),
            source: source.to_string(),
        });
        self
    }

    pub fn square(mut self, e: &str, f: &str, f2: &str, e2: &str) -> Self {
        self.squares
            .push([e.to_string(), f.to_string(), f2.to_string(), e2.to_string()]);
        self
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Edge {
    pub name: String,
    /// 0-based colour.
    pub color: usize,
    pub range: VertexId,
    pub source: VertexId,
}

/// A validated finite k-graph.
#[derive(Debug)]
pub struct KGraph {
    rank: usize,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: BTreeMap<String, VertexId>,
    edge_index: BTreeMap<String, EdgeId>,
    /// `(x, y) -> (y', x')` with `x y = y' x'`, for every composable pair of
    /// distinct colours.
    swaps: HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)>,
    /// `[v][c]`: edges of colour `c` with range `v`.
    leaving: Vec<Vec<Vec<EdgeId>>>,
    acyclic: bool,
    max_degree: Option<Degree>,
    all_paths: OnceLock<Vec<Path>>,
}

impl KGraph {
    /// Validates `spec` and builds the graph.
    pub fn new(spec: SkeletonSpec) -> Result<Self> {
        if spec.rank == 0 {
            return Err(Error::InvalidRank);
        }
        let rank = spec.rank;

        let mut seen = BTreeSet::new();
        for id in spec.vertices.iter().chain(spec.edges.iter().map(|e| &e.id)) {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }

        let mut vertices = spec.vertices.clone();
        vertices.sort();
        let vertex_index: BTreeMap<String, VertexId> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), VertexId(i as u32)))
            .collect();
        let lookup_vertex = |name: &str| {
            vertex_index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownId(name.to_string()))
        };

        let mut edge_specs = spec.edges.clone();
        edge_specs.sort_by(|a, b| a.id.cmp(&b.id));
        let mut edges = Vec::with_capacity(edge_specs.len());
        for e in &edge_specs {
            if e.color == 0 || e.color > rank {
                return Err(Error::UnknownColor { edge: e.id.clone(), color: e.color, rank });
            }
            edges.push(Edge {
                name: e.id.clone(),
                color: e.color - 1,
                range: lookup_vertex(&e.range)?,
                source: lookup_vertex(&e.source)?,
            });
        }
        let edge_index: BTreeMap<String, EdgeId> = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.name.clone(), EdgeId(i as u32)))
            .collect();

        let mut leaving = vec![vec![Vec::new(); rank]; vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            leaving[e.range.0 as usize][e.color].push(EdgeId(i as u32));
        }

        let swaps = build_swaps(&spec.squares, &edges, &edge_index)?;

        let mut graph = KGraph {
            rank,
            vertices,
            edges,
            vertex_index,
            edge_index,
            swaps,
            leaving,
            acyclic: false,
            max_degree: None,
            all_paths: OnceLock::new(),
        };
        graph.check_complete()?;
        if rank >= 3 {
            graph.check_hexagons()?;
        }
        graph.acyclic = graph.skeleton_is_acyclic();
        if graph.acyclic {
            graph.max_degree = Some(graph.longest_monochromatic());
        }
        Ok(graph)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0 as usize]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0 as usize].name
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    /// 0-based colour of `e`.
    pub fn color(&self, e: EdgeId) -> usize {
        self.edges[e.0 as usize].color
    }

    pub fn edge_range(&self, e: EdgeId) -> VertexId {
        self.edges[e.0 as usize].range
    }

    pub fn edge_source(&self, e: EdgeId) -> VertexId {
        self.edges[e.0 as usize].source
    }

    /// Edges of 0-based colour `c` whose range is `v`.
    pub fn edges_leaving(&self, v: VertexId, c: usize) -> &[EdgeId] {
        &self.leaving[v.0 as usize][c]
    }

    /// The square partner of the composable bicoloured pair `x y`.
    pub fn swap(&self, x: EdgeId, y: EdgeId) -> Option<(EdgeId, EdgeId)> {
        self.swaps.get(&(x, y)).copied()
    }

    /// Whether the 1-skeleton has no directed cycle, i.e. the category is finite.
    pub fn is_acyclic(&self) -> bool {
        self.acyclic
    }

    /// Coordinatewise maximum degree of a path, for acyclic graphs.
    pub fn max_degree(&self) -> Option<&Degree> {
        self.max_degree.as_ref()
    }

    /// Whether every vertex reachable from `v` receives edges of every colour
    /// (so `w Lambda^n` is nonempty for all such `w` and all `n`).
    pub fn source_free_from(&self, v: VertexId) -> bool {
        let mut seen = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(w) = stack.pop() {
            for c in 0..self.rank {
                let out = self.edges_leaving(w, c);
                if out.is_empty() {
                    return false;
                }
                for &e in out {
                    let s = self.edge_source(e);
                    if seen.insert(s) {
                        stack.push(s);
                    }
                }
            }
        }
        true
    }

    pub(crate) fn all_paths_cache(&self) -> &OnceLock<Vec<Path>> {
        &self.all_paths
    }

    /// The skeleton this graph was built from, in canonical order (vertices and
    /// edges sorted by id, each square listed once with its first edge of
    /// the smaller colour).
    pub fn to_spec(&self) -> SkeletonSpec {
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeSpec {
                id: e.name.clone(),
                color: e.color + 1,
                range: self.vertex_name(e.range).to_string(),
                source: self.vertex_name(e.source).to_string(),
            })
            .collect();
        let mut squares: Vec<[String; 4]> = Vec::new();
        for (&(x, y), &(y2, x2)) in &self.swaps {
            if self.color(x) < self.color(y) {
                squares.push([
                    self.edge_name(x).to_string(),
                    self.edge_name(y).to_string(),
                    self.edge_name(y2).to_string(),
                    self.edge_name(x2).to_string(),
                ]);
            }
        }
        squares.sort();
        SkeletonSpec { rank: self.rank, vertices: self.vertices.clone(), edges, squares }
    }

    fn check_complete(&self) -> Result<()> {
        for x in self.edge_ids() {
            let s = self.edge_source(x);
            for c in 0..self.rank {
                if c == self.color(x) {
                    continue;
                }
                for &y in self.edges_leaving(s, c) {
                    if !self.swaps.contains_key(&(x, y)) {
                        return Err(Error::MissingSquare {
                            first: self.edge_name(x).to_string(),
                            second: self.edge_name(y).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// For every composable triple with strictly decreasing colours, the two
    /// reduced swap sequences must produce the same sorted word.
    fn check_hexagons(&self) -> Result<()> {
        for x in self.edge_ids() {
            for cy in 0..self.color(x) {
                for &y in self.edges_leaving(self.edge_source(x), cy) {
                    for cz in 0..cy {
                        for &z in self.edges_leaving(self.edge_source(y), cz) {
                            let left = self.swap_at([x, y, z], &[0, 1, 0]);
                            let right = self.swap_at([x, y, z], &[1, 0, 1]);
                            if left != right {
                                return Err(Error::HexagonViolation {
                                    edges: [x, y, z]
                                        .iter()
                                        .map(|&e| self.edge_name(e).to_string())
                                        .collect(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn swap_at(&self, mut word: [EdgeId; 3], positions: &[usize]) -> [EdgeId; 3] {
        for &i in positions {
            let (a, b) = self.swaps[&(word[i], word[i + 1])];
            word[i] = a;
            word[i + 1] = b;
        }
        word
    }

    fn skeleton_is_acyclic(&self) -> bool {
        // Kahn's algorithm on the directed skeleton range -> source.
        let n = self.vertices.len();
        let mut indegree = vec![0usize; n];
        for e in &self.edges {
            indegree[e.source.0 as usize] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = queue.pop() {
            removed += 1;
            for c in 0..self.rank {
                for &e in &self.leaving[v][c] {
                    let s = self.edge_source(e).0 as usize;
                    indegree[s] -= 1;
                    if indegree[s] == 0 {
                        queue.push(s);
                    }
                }
            }
        }
        removed == n
    }

    /// By the factorisation property the colour-`c` coordinate of any path is
    /// bounded by the longest path of colour `c` alone.
    fn longest_monochromatic(&self) -> Degree {
        let n = self.vertices.len();
        let mut coords = vec![0u32; self.rank];
        for (c, best_c) in coords.iter_mut().enumerate() {
            let mut memo: Vec<Option<u32>> = vec![None; n];
            fn longest(g: &KGraph, c: usize, v: usize, memo: &mut Vec<Option<u32>>) -> u32 {
                if let Some(l) = memo[v] {
                    return l;
                }
                let l = g.leaving[v][c]
                    .iter()
                    .map(|&e| 1 + longest(g, c, g.edge_source(e).0 as usize, memo))
                    .max()
                    .unwrap_or(0);
                memo[v] = Some(l);
                l
            }
            for v in 0..n {
                *best_c = (*best_c).max(longest(self, c, v, &mut memo));
            }
        }
        Degree::new(coords)
    }
}

fn build_swaps(
    squares: &[[String; 4]],
    edges: &[Edge],
    index: &BTreeMap<String, EdgeId>,
) -> Result<HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)>> {
    let mut swaps: HashMap<(EdgeId, EdgeId), (EdgeId, EdgeId)> = HashMap::new();
    for sq in squares {
        let mut ids = [EdgeId(0); 4];
        for (slot, name) in ids.iter_mut().zip(sq) {
            *slot = *index.get(name).ok_or_else(|| Error::UnknownId(name.clone()))?;
        }
        let [e, f, f2, e2] = ids;
        let edge = |id: EdgeId| &edges[id.0 as usize];
        let bad = |reason: &str| Error::IncompatibleEndpoints {
            square: sq.to_vec(),
            reason: reason.to_string(),
        };
        if edge(e).color != edge(e2).color || edge(f).color != edge(f2).color {
            return Err(bad("opposite sides of a square must share a colour"));
        }
        if edge(e).color == edge(f).color {
            return Err(bad("a square needs two distinct colours"));
        }
        if edge(e).range != edge(f2).range {
            return Err(bad("r(e) != r(f')"));
        }
        if edge(e).source != edge(f).range {
            return Err(bad("s(e) != r(f)"));
        }
        if edge(f).source != edge(e2).source {
            return Err(bad("s(f) != s(e')"));
        }
        if edge(f2).source != edge(e2).range {
            return Err(bad("s(f') != r(e')"));
        }
        for (key, value) in [((e, f), (f2, e2)), ((f2, e2), (e, f))] {
            match swaps.get(&key) {
                Some(existing) if *existing == value => {}
                Some(_) => {
                    return Err(Error::NonBijectiveSquare {
                        first: edge(key.0).name.clone(),
                        second: edge(key.1).name.clone(),
                    })
                }
                None => {
                    swaps.insert(key, value);
                }
            }
        }
    }
    Ok(swaps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1_spec() -> SkeletonSpec {
        SkeletonSpec::new(2)
            .vertex("v")
            .edge("b", 1, "v", "v")
            .edge("r", 2, "v", "v")
            .square("b", "r", "r", "b")
    }

    #[test]
    fn single_vertex_rank_two_is_valid() {
        let g = KGraph::new(g1_spec()).unwrap();
        assert_eq!(g.rank(), 2);
        assert!(!g.is_acyclic());
        assert!(g.source_free_from(g.vertex_id("v").unwrap()));
    }

    #[test]
    fn missing_square_is_named() {
        let mut spec = g1_spec();
        spec.squares.clear();
        match KGraph::new(spec) {
            Err(Error::MissingSquare { first, second }) => {
                assert!(first == "b" || first == "r");
                assert_ne!(first, second);
            }
            other => panic!("expected MissingSquare, got {other:?}"),
        }
    }

    #[test]
    fn bad_endpoints_rejected() {
        let spec = SkeletonSpec::new(2)
            .vertex("u")
            .vertex("w")
            .edge("b", 1, "u", "w")
            .edge("r", 2, "w", "w")
            .edge("r2", 2, "u", "w")
            .edge("b2", 1, "w", "w")
            .square("b", "r", "r2", "b");
        assert!(matches!(KGraph::new(spec), Err(Error::IncompatibleEndpoints { .. })));
    }

    #[test]
    fn double_cover_is_not_bijective() {
        // Two (blue, red) pairs from u to w2 but the squares send both to
        // the same (red, blue) pair.
        let spec = SkeletonSpec::new(2)
            .vertex("u")
            .vertex("w")
            .vertex("x")
            .edge("b", 1, "u", "w")
            .edge("r", 2, "w", "x")
            .edge("r1", 2, "u", "w")
            .edge("b1", 1, "w", "x")
            .edge("rr", 2, "w", "x")
            .square("b", "r", "r1", "b1")
            .square("b", "rr", "r1", "b1");
        assert!(matches!(KGraph::new(spec), Err(Error::NonBijectiveSquare { .. })));
    }

    #[test]
    fn duplicate_ids_and_colors() {
        let spec = SkeletonSpec::new(1).vertex("v").edge("v", 1, "v", "v");
        assert_eq!(KGraph::new(spec).unwrap_err(), Error::DuplicateId("v".into()));
        let spec = SkeletonSpec::new(1).vertex("v").edge("e", 2, "v", "v");
        assert!(matches!(KGraph::new(spec), Err(Error::UnknownColor { .. })));
        let spec = SkeletonSpec::new(1).vertex("v").edge("e", 1, "v", "w");
        assert_eq!(KGraph::new(spec).unwrap_err(), Error::UnknownId("w".into()));
        assert_eq!(KGraph::new(SkeletonSpec::new(0)).unwrap_err(), Error::InvalidRank);
    }

    fn rank_three_loops(pi: [&str; 3], rho: [&str; 3]) -> SkeletonSpec {
        // One vertex; loops a (colour 1), b (colour 2), c/d/e (colour 3).
        // a x = rho(x) a and b x = pi(x) b.
        let mut spec = SkeletonSpec::new(3)
            .vertex("v")
            .edge("a", 1, "v", "v")
            .edge("b", 2, "v", "v")
            .edge("c", 3, "v", "v")
            .edge("d", 3, "v", "v")
            .edge("e", 3, "v", "v")
            .square("a", "b", "b", "a");
        for (i, x) in ["c", "d", "e"].into_iter().enumerate() {
            spec = spec.square("a", x, rho[i], "a").square("b", x, pi[i], "b");
        }
        spec
    }

    #[test]
    fn hexagon_needs_commuting_twists() {
        // Two commuting permutations of {c, d, e}.
        let ok = rank_three_loops(["d", "e", "c"], ["e", "c", "d"]);
        assert!(KGraph::new(ok).is_ok());
        // (c d) and (d e) do not commute.
        let broken = rank_three_loops(["d", "c", "e"], ["c", "e", "d"]);
        assert!(matches!(KGraph::new(broken), Err(Error::HexagonViolation { .. })));
    }
}
