//! Combinatorics and finite-dimensional representations of relative
//! Cuntz-Krieger algebras of finite higher-rank graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`], [`path`], [`degree`]: k-graphs given by coloured skeletons
//!   and factorisation squares, with paths in colour-sorted normal form.
//! * [`alignment`]: minimal common extensions, `Lambda_min`, `Ext(mu; E)`
//!   and the `Pi E` closure.
//! * [`exhaustive`]: exhaustiveness verdicts and enumeration of finite
//!   exhaustive sets in a degree window.
//! * [`satiation`]: the satiation axioms, the maps `Sigma_1..Sigma_4` and
//!   their fixpoint.
//! * [`boundary`]: boundary paths compatible with a satiated collection,
//!   their construction, and aperiodicity.
//! * [`repn`]: sparse-matrix Cuntz-Krieger families, the boundary-path
//!   representation, matrix units and the relation and uniqueness checks.

pub mod alignment;
pub mod boundary;
pub mod degree;
pub mod error;
pub mod exhaustive;
pub mod fixtures;
pub mod graph;
pub mod path;
pub mod repn;
pub mod satiation;

pub use alignment::{MinPair, PathFamily};
pub use boundary::{BoundaryPath, ConditionCReport, DiagonalListing};
pub use degree::Degree;
pub use error::{Error, Result};
pub use exhaustive::{ExhaustiveStatus, ExhaustiveVerdict};
pub use graph::{EdgeId, EdgeSpec, KGraph, SkeletonSpec, VertexId};
pub use path::Path;
pub use repn::{CKFamily, FormalElement, Scalar, SparseMatrix};
pub use satiation::{FamilyCollection, Membership, Universe, Window};
