//! Concrete Cuntz-Krieger families as sparse matrices.
//!
//! A [`CKFamily`] assigns a matrix `t_lambda` to each path. The
//! boundary-path representation [`boundary_rep`] is built from a satiated
//! collection; [`FormalElement`]s are finite sums `sum a t_lambda t_mu^*`
//! multiplied with the `Lambda_min` expansion and evaluated in any family.
//! The functions in [`checks`] test the relations, the matrix-unit
//! identities, faithfulness on the core, and gauge compatibility.

pub mod checks;
mod family;
mod formal;
mod scalar;
mod sparse;

pub use checks::{
    canonical_windows, expectation_contraction_check, faithful_on_core_check, formal_theta, gap_product,
    gauge_average_check, gauge_lattice, gauge_unitary_check, matrix_unit_check, nonzero_theta_pattern,
    sample_torus, shift_gaps_check, tail_set, theta, torus_power, verify_family, CheckOutcome, FaithfulVerdict,
    FamilyReport, UniquenessCertificate,
};
pub use family::{boundary_rep, CKFamily};
pub use formal::FormalElement;
pub use scalar::Scalar;
pub use sparse::SparseMatrix;

/// Exact scalars.
pub type Rational = num_rational::BigRational;
/// Floating scalars.
pub type Complex = num_complex::Complex64;
