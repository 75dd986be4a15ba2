//! Graph files and matrix bundles.
//!
//! A graph file is JSON mirroring [`SkeletonSpec`]:
//!
//! ```json
//! {
//!   "rank": 2,
//!   "vertices": ["v"],
//!   "edges": [{"id": "b", "color": 1, "range": "v", "source": "v"}],
//!   "squares": [["b", "r", "r", "b"]]
//! }
//! ```
//!
//! Emitting sorts vertices, edges and squares, so `emit(parse(f))` is a
//! canonical form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::str::FromStr;

use kgraph_core::{CKFamily, EdgeSpec, KGraph, Path, Scalar, SkeletonSpec, SparseMatrix};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    rank: usize,
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
    #[serde(default)]
    squares: Vec<[String; 4]>,
}

#[derive(Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    color: usize,
    id: String,
    range: String,
    source: String,
}

/// Parses a graph file and checks ids and colours. Square consistency is
/// left to [`KGraph::new`].
pub fn parse_graph(text: &str) -> Result<SkeletonSpec, CliError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut seen = BTreeSet::new();
    for v in &file.vertices {
        if !seen.insert(v.as_str()) {
            return Err(kgraph_core::Error::DuplicateId(v.clone()).into());
        }
    }
    let mut seen = BTreeSet::new();
    for e in &file.edges {
        if !seen.insert(e.id.as_str()) {
            return Err(kgraph_core::Error::DuplicateId(e.id.clone()).into());
        }
        if e.color == 0 || e.color > file.rank {
            return Err(kgraph_core::Error::UnknownColor { edge: e.id.clone(), color: e.color, rank: file.rank }.into());
        }
    }
    Ok(SkeletonSpec {
        rank: file.rank,
        vertices: file.vertices,
        edges: file
            .edges
            .into_iter()
            .map(|e| EdgeSpec { id: e.id, color: e.color, range: e.range, source: e.source })
            .collect(),
        squares: file.squares,
    })
}

/// Canonical JSON for a spec.
pub fn emit_graph(spec: &SkeletonSpec) -> String {
    let mut vertices = spec.vertices.clone();
    vertices.sort();
    let mut edges: Vec<EdgeRecord> = spec
        .edges
        .iter()
        .map(|e| EdgeRecord { color: e.color, id: e.id.clone(), range: e.range.clone(), source: e.source.clone() })
        .collect();
    edges.sort();
    let mut squares = spec.squares.clone();
    squares.sort();
    let file = GraphFile { rank: spec.rank, vertices, edges, squares };
    let mut out = serde_json::to_string_pretty(&file).expect("graph files always serialise");
    out.push('\n');
    out
}

/// A family as dense labels and sparse triplets. Entries are strings:
/// `p/q` for the exact backend, `a+bi` for the float one.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MatrixBundle {
    pub backend: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    pub operators: Vec<Operator>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Operator {
    pub path: String,
    pub entries: Vec<(usize, usize, String)>,
}

impl MatrixBundle {
    pub fn from_family<S: Scalar + Display>(g: &KGraph, t: &CKFamily<S>, backend: &str) -> Self {
        let label = |p: &Path| g.show(p).to_string();
        MatrixBundle {
            backend: backend.to_string(),
            dim: t.dim(),
            basis: t.basis().map(|b| b.iter().map(label).collect()),
            operators: t
                .operators()
                .iter()
                .map(|(p, m)| Operator {
                    path: label(p),
                    entries: m.triplets().map(|(i, j, x)| (i, j, x.to_string())).collect(),
                })
                .collect(),
        }
    }

    pub fn to_family<S: Scalar + FromStr>(&self, g: &KGraph) -> Result<CKFamily<S>, CliError> {
        let basis = match &self.basis {
            Some(labels) => Some(labels.iter().map(|l| g.parse_path(l)).collect::<Result<Vec<_>, _>>()?),
            None => None,
        };
        let mut ops = BTreeMap::new();
        for op in &self.operators {
            let p = g.parse_path(&op.path)?;
            let mut entries = Vec::with_capacity(op.entries.len());
            for (i, j, x) in &op.entries {
                if *i >= self.dim || *j >= self.dim {
                    return Err(CliError::Usage(format!("entry ({i}, {j}) of {} is outside dimension {}", op.path, self.dim)));
                }
                let value = x
                    .parse::<S>()
                    .map_err(|_| CliError::Usage(format!("cannot read `{x}` as a {} entry", self.backend)))?;
                entries.push((*i, *j, value));
            }
            ops.insert(p, SparseMatrix::from_triplets(self.dim, self.dim, entries));
        }
        Ok(CKFamily::new(self.dim, basis, ops)?)
    }
}
