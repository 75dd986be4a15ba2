use std::collections::BTreeMap;

use num_complex::Complex64;

use super::scalar::Scalar;
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use crate::graph::KGraph;
use crate::path::Path;
use crate::satiation::{FamilyCollection, Universe};

/// An assignment `lambda -> t_lambda` of square matrices to the paths of a
/// graph (all paths when the graph is acyclic, a window otherwise).
#[derive(Clone, Debug, PartialEq)]
pub struct CKFamily<S> {
    dim: usize,
    basis: Option<Vec<Path>>,
    ops: BTreeMap<Path, SparseMatrix<S>>,
}

impl<S: Scalar> CKFamily<S> {
    pub fn new(dim: usize, basis: Option<Vec<Path>>, ops: BTreeMap<Path, SparseMatrix<S>>) -> Result<Self> {
        if let Some(b) = &basis {
            if b.len() != dim {
                return Err(Error::DimensionMismatch(format!("{} basis labels for dimension {dim}", b.len())));
            }
        }
        if let Some((p, m)) = ops.iter().find(|(_, m)| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "matrix for {p:?} is {}x{}, expected {dim}x{dim}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(CKFamily { dim, basis, ops })
    }

    /// The family with every `t_lambda = 0` on a `dim`-dimensional space.
    pub fn zero(g: &KGraph, dim: usize) -> Result<Self> {
        let ops = g.all_paths()?.iter().map(|p| (p.clone(), SparseMatrix::zeros(dim, dim))).collect();
        Self::new(dim, None, ops)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis vectors labelled by paths, when the carrier space has them.
    pub fn basis(&self) -> Option<&[Path]> {
        self.basis.as_deref()
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.ops.keys()
    }

    pub fn operators(&self) -> &BTreeMap<Path, SparseMatrix<S>> {
        &self.ops
    }

    pub fn contains(&self, p: &Path) -> bool {
        self.ops.contains_key(p)
    }

    pub fn t(&self, p: &Path) -> Result<&SparseMatrix<S>> {
        self.ops.get(p).ok_or_else(|| Error::IncompleteFamily(format!("no operator for {p:?}")))
    }

    /// Replaces one operator; used to inject faults.
    pub fn set(&mut self, p: Path, m: SparseMatrix<S>) -> Result<()> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!("{}x{}", m.nrows(), m.ncols())));
        }
        self.ops.insert(p, m);
        Ok(())
    }

    /// `t_lambda t_lambda^*`.
    pub fn range_projection(&self, p: &Path) -> Result<SparseMatrix<S>> {
        let t = self.t(p)?;
        Ok(t.matmul(&t.adjoint()))
    }

    pub fn identity(&self) -> SparseMatrix<S> {
        SparseMatrix::identity(self.dim)
    }

    pub fn to_complex(&self) -> CKFamily<Complex64> {
        CKFamily {
            dim: self.dim,
            basis: self.basis.clone(),
            ops: self.ops.iter().map(|(p, m)| (p.clone(), m.to_complex())).collect(),
        }
    }
}

/// The boundary-path representation: basis `e_x` for the boundary paths
/// `x` of `s`, and `t_lambda e_x = e_{lambda x}` when `s(lambda) = r(x)`,
/// zero otherwise.
pub fn boundary_rep<S: Scalar>(u: &Universe<'_>, s: &FamilyCollection) -> Result<CKFamily<S>> {
    let g = u.graph();
    let basis: Vec<Path> = u.all_boundary_paths(s)?.into_iter().map(|x| x.into_path()).collect();
    let index: BTreeMap<&Path, usize> = basis.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let dim = basis.len();
    let mut ops = BTreeMap::new();
    for lam in g.all_paths()? {
        let mut entries = Vec::new();
        for (j, x) in basis.iter().enumerate().filter(|(_, x)| x.range() == lam.source()) {
            let lx = g.compose(lam, x)?;
            let i = *index.get(&lx).ok_or_else(|| {
                Error::InvariantViolated(format!("{} is not a boundary path", g.show(&lx)))
            })?;
            entries.push((i, j, S::one()));
        }
        ops.insert(lam.clone(), SparseMatrix::from_triplets(dim, dim, entries));
    }
    CKFamily::new(dim, Some(basis), ops)
}
