use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::scalar::Scalar;

/// A matrix stored as one ordered map of nonzero entries per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<S> {
    cols: usize,
    rows: Vec<BTreeMap<usize, S>>,
}

impl<S: Scalar> SparseMatrix<S> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { cols: ncols, rows: vec![BTreeMap::new(); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_triplets(nrows: usize, ncols: usize, entries: impl IntoIterator<Item = (usize, usize, S)>) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for (i, j, x) in entries {
            let sum = m.get(i, j) + x;
            m.set(i, j, sum);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.rows[i].get(&j).cloned().unwrap_or_else(S::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, x: S) {
        assert!(i < self.nrows() && j < self.cols, "entry ({i}, {j}) out of bounds");
        if x.is_zero() {
            self.rows[i].remove(&j);
        } else {
            self.rows[i].insert(j, x);
        }
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.rows.iter().enumerate().flat_map(|(i, row)| row.iter().map(move |(&j, x)| (i, j, x)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BTreeMap::is_empty)
    }

    pub fn plus(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    /// Applies `op` entrywise where `other` is nonzero; `op(x, 0)` must be `x`.
    fn combine(&self, other: &Self, op: impl Fn(S, S) -> S) -> Self {
        assert_eq!((self.nrows(), self.cols), (other.nrows(), other.cols), "shape mismatch");
        let mut out = self.clone();
        for (i, row) in other.rows.iter().enumerate() {
            for (&j, x) in row {
                let value = op(out.get(i, j), x.clone());
                out.set(i, j, value);
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.nrows(), "shape mismatch");
        let mut out = Self::zeros(self.nrows(), other.cols);
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc: BTreeMap<usize, S> = BTreeMap::new();
            for (&k, a) in row {
                for (&j, b) in &other.rows[k] {
                    let term = a.clone() * b.clone();
                    let slot = acc.entry(j).or_insert_with(S::zero);
                    *slot = slot.clone() + term;
                }
            }
            acc.retain(|_, x| !x.is_zero());
            out.rows[i] = acc;
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zeros(self.nrows(), self.cols);
        for (i, j, x) in self.triplets() {
            out.set(i, j, c.clone() * x.clone());
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.nrows());
        for (i, j, x) in self.triplets() {
            out.set(j, i, x.conj());
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.triplets().map(|(_, _, x)| x.modulus()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.minus(other).max_abs()
    }

    pub fn frobenius(&self) -> f64 {
        self.triplets().map(|(_, _, x)| x.modulus().powi(2)).sum::<f64>().sqrt()
    }

    pub fn to_complex(&self) -> SparseMatrix<Complex64> {
        SparseMatrix {
            cols: self.cols,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|(&j, x)| (j, x.to_complex())).collect())
                .collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.nrows(), self.cols);
        for (i, j, x) in self.triplets() {
            m[(i, j)] = x.to_complex();
        }
        m
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let dense = self.to_dense();
        dense.svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
    }
}
