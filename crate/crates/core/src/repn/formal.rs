use std::collections::BTreeMap;

use super::family::CKFamily;
use super::scalar::Scalar;
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use crate::graph::KGraph;
use crate::path::Path;

/// A finite sum `sum a_{lambda,mu} t_lambda t_mu^*` with `s(lambda) = s(mu)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalElement<S> {
    terms: BTreeMap<(Path, Path), S>,
}

impl<S: Scalar> Default for FormalElement<S> {
    fn default() -> Self {
        FormalElement { terms: BTreeMap::new() }
    }
}

impl<S: Scalar> FormalElement<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c t_lambda t_mu^*`.
    pub fn term(lambda: Path, mu: Path, c: S) -> Result<Self> {
        let mut out = Self::zero();
        out.add_term(lambda, mu, c)?;
        Ok(out)
    }

    pub fn add_term(&mut self, lambda: Path, mu: Path, c: S) -> Result<()> {
        if lambda.source() != mu.source() {
            return Err(Error::PreconditionFailed(format!(
                "t_lambda t_mu^* needs s(lambda) = s(mu): {lambda:?}, {mu:?}"
            )));
        }
        let key = (lambda, mu);
        let sum = self.terms.get(&key).cloned().unwrap_or_else(S::zero) + c;
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
        Ok(())
    }

    pub fn terms(&self) -> &BTreeMap<(Path, Path), S> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((l, m), c) in &other.terms {
            out.add_term(l.clone(), m.clone(), c.clone()).expect("keys were valid");
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero();
        for ((l, m), a) in &self.terms {
            out.add_term(l.clone(), m.clone(), c.clone() * a.clone()).expect("keys were valid");
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(&-S::one()))
    }

    /// The adjoint: `(lambda, mu)` terms become `(mu, lambda)` terms with
    /// conjugated coefficients.
    pub fn star(&self) -> Self {
        FormalElement {
            terms: self.terms.iter().map(|((l, m), c)| ((m.clone(), l.clone()), c.conj())).collect(),
        }
    }

    /// The product, expanding `t_mu1^* t_lambda2` over `Lambda_min(mu1, lambda2)`.
    pub fn mul(&self, g: &KGraph, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((l1, m1), a) in &self.terms {
            for ((l2, m2), b) in &other.terms {
                for pair in g.lambda_min(m1, l2) {
                    let left = g.compose(l1, &pair.alpha).expect("s(l1) = s(m1) = r(alpha)");
                    let right = g.compose(m2, &pair.beta).expect("s(m2) = s(l2) = r(beta)");
                    out.add_term(left, right, a.clone() * b.clone()).expect("sources agree");
                }
            }
        }
        out
    }

    /// Keeps the terms with `d(lambda) = d(mu)`.
    pub fn gauge_expectation(&self) -> Self {
        FormalElement {
            terms: self
                .terms
                .iter()
                .filter(|((l, m), _)| l.degree() == m.degree())
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// `sum a_{lambda,mu} t_lambda t_mu^*` in the family `t`.
    pub fn eval(&self, t: &CKFamily<S>) -> Result<SparseMatrix<S>> {
        let mut out = SparseMatrix::zeros(t.dim(), t.dim());
        for ((l, m), c) in &self.terms {
            let piece = t.t(l)?.matmul(&t.t(m)?.adjoint()).scale(c);
            out = out.plus(&piece);
        }
        Ok(out)
    }
}
