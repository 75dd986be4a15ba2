//! Paths in colour-sorted normal form, and the factorisation property.

use std::fmt;

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, KGraph, VertexId};

/// A morphism of the k-graph.
///
/// The word lists edges from the range end, all colour-1 edges first, then
/// colour 2, and so on. Vertices are the paths with an empty word. Field
/// order gives the canonical ordering: degree, then word, then range.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    degree: Degree,
    word: Vec<EdgeId>,
    range: VertexId,
    source: VertexId,
}

impl Path {
    pub fn degree(&self) -> &Degree {
        &self.degree
    }

    pub fn word(&self) -> &[EdgeId] {
        &self.word
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn is_vertex(&self) -> bool {
        self.word.is_empty()
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            write!(f, "v{}", self.range.0)
        } else {
            let ids: Vec<String> = self.word.iter().map(|e| format!("e{}", e.0)).collect();
            write!(f, "{}", ids.join("."))
        }
    }
}

/// Renders a path as `vertex` or `e1.e2...` using graph ids.
pub struct PathDisplay<'a> {
    graph: &'a KGraph,
    path: &'a Path,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_vertex() {
            return f.write_str(self.graph.vertex_name(self.path.range));
        }
        for (i, &e) in self.path.word.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(self.graph.edge_name(e))?;
        }
        Ok(())
    }
}

impl KGraph {
    pub fn show<'a>(&'a self, path: &'a Path) -> PathDisplay<'a> {
        PathDisplay { graph: self, path }
    }

    pub fn vertex_path(&self, v: VertexId) -> Path {
        Path { degree: Degree::zero(self.rank()), word: Vec::new(), range: v, source: v }
    }

    pub fn edge_path(&self, e: EdgeId) -> Path {
        Path {
            degree: Degree::unit(self.rank(), self.color(e)),
            word: vec![e],
            range: self.edge_range(e),
            source: self.edge_source(e),
        }
    }

    /// Builds the path of an arbitrary composable edge word starting at `v`.
    pub fn path_from_word(&self, v: VertexId, word: &[EdgeId]) -> Result<Path> {
        let mut at = v;
        for &e in word {
            if self.edge_range(e) != at {
                return Err(Error::MalformedPath(format!(
                    "edge `{}` does not start at `{}`",
                    self.edge_name(e),
                    self.vertex_name(at)
                )));
            }
            at = self.edge_source(e);
        }
        let mut keyed: Vec<(EdgeId, usize)> = word.iter().map(|&e| (e, self.color(e))).collect();
        self.sort_keyed(&mut keyed);
        Ok(self.assemble(v, keyed.into_iter().map(|(e, _)| e).collect()))
    }

    /// Parses `vertex` or `e1.e2...` (edge ids in any composable order).
    pub fn parse_path(&self, text: &str) -> Result<Path> {
        let text = text.trim();
        if let Some(v) = self.vertex_id(text) {
            return Ok(self.vertex_path(v));
        }
        let word = text
            .split('.')
            .map(|name| self.edge_id(name.trim()).ok_or_else(|| Error::UnknownId(name.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let first = *word.first().ok_or_else(|| Error::MalformedPath(text.to_string()))?;
        self.path_from_word(self.edge_range(first), &word)
    }

    /// `p q`, in normal form.
    pub fn compose(&self, p: &Path, q: &Path) -> Result<Path> {
        if p.source != q.range {
            return Err(Error::NotComposable {
                left: self.show(p).to_string(),
                right: self.show(q).to_string(),
            });
        }
        if q.is_vertex() {
            return Ok(p.clone());
        }
        if p.is_vertex() {
            return Ok(q.clone());
        }
        let mut keyed: Vec<(EdgeId, usize)> =
            p.word.iter().chain(&q.word).map(|&e| (e, self.color(e))).collect();
        self.sort_keyed(&mut keyed);
        Ok(Path {
            degree: &p.degree + &q.degree,
            word: keyed.into_iter().map(|(e, _)| e).collect(),
            range: p.range,
            source: q.source,
        })
    }

    /// The unique `(p(0, m), p(m, d(p)))`.
    pub fn factor(&self, p: &Path, m: &Degree) -> Result<(Path, Path)> {
        if !m.le(&p.degree) {
            return Err(self.out_of_range(p, &Degree::zero(self.rank()), m));
        }
        // Tag the first m_c edges of each colour c; the tag is preserved by
        // square swaps because swaps only exchange edges of different colours.
        let mut seen = vec![0u32; self.rank()];
        let mut keyed: Vec<(EdgeId, (bool, usize))> = p
            .word
            .iter()
            .map(|&e| {
                let c = self.color(e);
                let tail = seen[c] >= m[c];
                seen[c] += 1;
                (e, (tail, c))
            })
            .collect();
        self.sort_keyed(&mut keyed);
        let split = m.total() as usize;
        let word: Vec<EdgeId> = keyed.into_iter().map(|(e, _)| e).collect();
        let head = self.assemble(p.range, word[..split].to_vec());
        let tail = self.assemble(head.source, word[split..].to_vec());
        Ok((head, tail))
    }

    /// `p(m, n)`.
    pub fn segment(&self, p: &Path, m: &Degree, n: &Degree) -> Result<Path> {
        if !(m.le(n) && n.le(&p.degree)) {
            return Err(self.out_of_range(p, m, n));
        }
        let (_, rest) = self.factor(p, m)?;
        let span = n.checked_sub(m).expect("m <= n");
        Ok(self.factor(&rest, &span)?.0)
    }

    /// The vertex of `p` at position `n`, i.e. `s(p(0, n))`.
    pub fn vertex_at(&self, p: &Path, n: &Degree) -> Result<VertexId> {
        Ok(self.factor(p, n)?.0.source)
    }

    /// Whether `q` is an initial segment of `p`.
    pub fn has_prefix(&self, p: &Path, q: &Path) -> bool {
        p.range == q.range
            && q.degree.le(&p.degree)
            && self.factor(p, &q.degree).map(|(head, _)| head == *q).unwrap_or(false)
    }

    /// `v Lambda^n`, sorted.
    pub fn paths(&self, v: VertexId, n: &Degree) -> Vec<Path> {
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(n.total() as usize);
        self.walk_blocks(v, n, 0, &mut word, &mut |g, w| {
            out.push(g.assemble_with_degree(v, w.to_vec(), n.clone()))
        });
        out.sort();
        out
    }

    /// `v Lambda^{<= bound}`, sorted.
    pub fn paths_up_to(&self, v: VertexId, bound: &Degree) -> Vec<Path> {
        let mut out: Vec<Path> = bound.box_below().iter().flat_map(|n| self.paths(v, n)).collect();
        out.sort();
        out
    }

    /// `v Lambda`, for acyclic graphs.
    pub fn paths_from(&self, v: VertexId) -> Result<Vec<Path>> {
        let top = self.max_degree().ok_or(Error::CyclicGraphUnsupported("paths_from"))?;
        Ok(self.paths_up_to(v, top))
    }

    /// Every path of the (finite) category, sorted.
    pub fn all_paths(&self) -> Result<&[Path]> {
        if !self.is_acyclic() {
            return Err(Error::CyclicGraphUnsupported("all_paths"));
        }
        Ok(self.all_paths_cache().get_or_init(|| {
            let mut all: Vec<Path> = self
                .vertices()
                .flat_map(|v| self.paths_from(v).expect("acyclic"))
                .collect();
            all.sort();
            all
        }))
    }

    /// `Lambda w`: paths whose source is `w`, for acyclic graphs.
    pub fn paths_into(&self, w: VertexId) -> Result<Vec<Path>> {
        Ok(self.all_paths()?.iter().filter(|p| p.source == w).cloned().collect())
    }

    fn walk_blocks(
        &self,
        at: VertexId,
        remaining: &Degree,
        color: usize,
        word: &mut Vec<EdgeId>,
        emit: &mut dyn FnMut(&KGraph, &[EdgeId]),
    ) {
        if color == self.rank() {
            emit(self, word);
            return;
        }
        let placed = word.iter().filter(|&&e| self.color(e) == color).count() as u32;
        if placed == remaining[color] {
            self.walk_blocks(at, remaining, color + 1, word, emit);
            return;
        }
        for &e in self.edges_leaving(at, color) {
            word.push(e);
            self.walk_blocks(self.edge_source(e), remaining, color, word, emit);
            word.pop();
        }
    }

    /// Insertion sort by key using square swaps for adjacent transpositions.
    /// Keys must already be sorted among edges of equal colour.
    fn sort_keyed<K: Ord + Copy>(&self, items: &mut [(EdgeId, K)]) {
        for i in 1..items.len() {
            let mut j = i;
            while j > 0 && items[j - 1].1 > items[j].1 {
                let (x, kx) = items[j - 1];
                let (y, ky) = items[j];
                debug_assert_ne!(self.color(x), self.color(y));
                let (y2, x2) = self.swap(x, y).expect("validated graphs have every square");
                items[j - 1] = (y2, ky);
                items[j] = (x2, kx);
                j -= 1;
            }
        }
    }

    fn assemble(&self, range: VertexId, word: Vec<EdgeId>) -> Path {
        let mut degree = Degree::zero(self.rank()).coords().to_vec();
        for &e in &word {
            degree[self.color(e)] += 1;
        }
        self.assemble_with_degree(range, word, Degree::new(degree))
    }

    fn assemble_with_degree(&self, range: VertexId, word: Vec<EdgeId>, degree: Degree) -> Path {
        let source = word.last().map(|&e| self.edge_source(e)).unwrap_or(range);
        Path { degree, word, range, source }
    }

    fn out_of_range(&self, p: &Path, lo: &Degree, hi: &Degree) -> Error {
        Error::DegreeOutOfRange {
            lo: lo.to_string(),
            hi: hi.to_string(),
            degree: p.degree.to_string(),
        }
    }
}
