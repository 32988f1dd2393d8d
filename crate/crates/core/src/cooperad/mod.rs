//! The co-operad of local functions: insertions, general co-composition,
//! the expansion kernels, the regularity filtration and the `W_k` test.
//!
//! Co-composition produces infinite sums, so every operation here returns a
//! single graded component.

mod filtration;
mod insert;
mod kernel;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::localfn::{FactorDoc, LocalFn, LocalFnError, LocalMonomial};
use crate::rational::{fmt_rational, parse_rational};
use crate::Q;

pub use filtration::{filtration_basis, filtration_level, in_connective, SortSignature};
pub use insert::{cocompose_general, insert_at, insert_component};
pub use kernel::{kernel_closed_form, kernel_routes, kernel_table, KernelKind, KernelTable};
pub use verify::{
    check_coassociativity, check_cocomposition, check_commutativity, check_equivariance,
    random_monomial, verify_axioms, CheckRecord, VerifyConfig, VerifyReport,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CooperadError {
    #[error("function is not homogeneous; split it with grade_components first")]
    NotHomogeneous,
    #[error("cannot split arity {n} at {m}")]
    BadSplit { m: usize, n: usize },
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("multidegree {got:?} does not sum to the grading {grading}")]
    BadMultidegree { got: Vec<i64>, grading: i64 },
    #[error("bad subset: {0}")]
    BadSubset(String),
    #[error(transparent)]
    LocalFn(#[from] LocalFnError),
}

type Key = (LocalMonomial, Vec<LocalMonomial>);

/// A finite sum of `outer ⊗ inner_1 ⊗ .. ⊗ inner_k` over basis monomials.
///
/// Storing coefficients on pairs of basis monomials is what makes the
/// representation unique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    outer_arity: usize,
    inner_arities: Vec<usize>,
    terms: BTreeMap<Key, Q>,
}

impl TensorElement {
    pub fn zero(outer_arity: usize, inner_arities: Vec<usize>) -> Self {
        TensorElement {
            outer_arity,
            inner_arities,
            terms: BTreeMap::new(),
        }
    }

    /// `f` with no inner factors, the starting point of iterated insertion.
    pub fn from_fn(f: &LocalFn) -> Self {
        let mut t = Self::zero(f.arity(), vec![]);
        for (m, c) in f.terms() {
            t.add_term(m.clone(), vec![], c.clone());
        }
        t
    }

    pub fn outer_arity(&self) -> usize {
        self.outer_arity
    }

    pub fn inner_arities(&self) -> &[usize] {
        &self.inner_arities
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LocalMonomial, &[LocalMonomial], &Q)> {
        self.terms.iter().map(|((o, i), c)| (o, i.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, outer: &LocalMonomial, inner: &[LocalMonomial]) -> Q {
        self.terms
            .get(&(outer.clone(), inner.to_vec()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub(crate) fn add_term(&mut self, outer: LocalMonomial, inner: Vec<LocalMonomial>, c: Q) {
        if c.is_zero() {
            return;
        }
        let key = (outer, inner);
        let slot = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Adds `c * outer ⊗ inners[0] ⊗ ..`, expanded over basis monomials.
    pub(crate) fn add_product(&mut self, outer: &LocalFn, inners: &[LocalFn], c: &Q) {
        let mut partial: Vec<(Vec<LocalMonomial>, Q)> = vec![(vec![], c.clone())];
        for f in inners {
            let mut next = Vec::with_capacity(partial.len() * f.len());
            for (ms, a) in &partial {
                for (m, b) in f.terms() {
                    let mut v = ms.clone();
                    v.push(m.clone());
                    next.push((v, a * b));
                }
            }
            partial = next;
        }
        for (om, oc) in outer.terms() {
            for (ms, a) in &partial {
                self.add_term(om.clone(), ms.clone(), oc * a);
            }
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.outer_arity, other.outer_arity);
        assert_eq!(self.inner_arities, other.inner_arities);
        let mut out = self.clone();
        for ((o, i), c) in &other.terms {
            out.add_term(o.clone(), i.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> TensorElement {
        let mut out = Self::zero(self.outer_arity, self.inner_arities.clone());
        for ((o, i), a) in &self.terms {
            out.add_term(o.clone(), i.clone(), a * c);
        }
        out
    }

    /// Renames variables of one tensor slot (0 is the outer factor, `k + 1`
    /// the k-th inner one), as in [`LocalFn::substitute`].
    pub fn relabel(&self, slot: usize, target: &[usize]) -> TensorElement {
        let arity = if slot == 0 {
            self.outer_arity
        } else {
            self.inner_arities[slot - 1]
        };
        assert_eq!(target.len(), arity);
        let mut out = Self::zero(self.outer_arity, self.inner_arities.clone());
        for ((o, i), c) in &self.terms {
            let mut factors: Vec<LocalFn> = std::iter::once(o)
                .chain(i.iter())
                .map(|m| LocalFn::monomial(m.clone()))
                .collect();
            factors[slot] = factors[slot].substitute(arity, target);
            out.add_product(&factors[0], &factors[1..], c);
        }
        out
    }

    /// Reorders the inner factors: new inner `k` is old inner `order[k]`.
    pub fn reorder_inners(&self, order: &[usize]) -> TensorElement {
        let arities = order.iter().map(|&k| self.inner_arities[k]).collect();
        let mut out = Self::zero(self.outer_arity, arities);
        for ((o, i), c) in &self.terms {
            let inner = order.iter().map(|&k| i[k].clone()).collect();
            out.add_term(o.clone(), inner, c.clone());
        }
        out
    }

    /// Inserts the variables `subset` of the outer factor, appending the new
    /// inner factor at the end.
    pub fn insert_outer(&self, subset: &[usize], p: i64) -> Result<TensorElement, CooperadError> {
        let mut arities = self.inner_arities.clone();
        arities.push(subset.len());
        let mut out = Self::zero(self.outer_arity - subset.len() + 1, arities);
        for ((o, i), c) in &self.terms {
            let split = insert_at(&LocalFn::monomial(o.clone()), subset, p)?;
            for ((o2, i2), c2) in &split.terms {
                let mut inner = i.clone();
                inner.extend(i2.iter().cloned());
                out.add_term(o2.clone(), inner, c * c2);
            }
        }
        Ok(out)
    }

    /// Inserts the variables `subset` of inner factor `idx`. Its outer part
    /// stays at position `idx`; the new inner factor is appended.
    pub fn insert_inner(
        &self,
        idx: usize,
        subset: &[usize],
        p: i64,
    ) -> Result<TensorElement, CooperadError> {
        let mut arities = self.inner_arities.clone();
        arities[idx] = arities[idx] - subset.len() + 1;
        arities.push(subset.len());
        let mut out = Self::zero(self.outer_arity, arities);
        for ((o, i), c) in &self.terms {
            let split = insert_at(&LocalFn::monomial(i[idx].clone()), subset, p)?;
            for ((o2, i2), c2) in &split.terms {
                let mut inner = i.clone();
                inner[idx] = o2.clone();
                inner.extend(i2.iter().cloned());
                out.add_term(o.clone(), inner, c * c2);
            }
        }
        Ok(out)
    }

    /// The first key on which the two elements disagree, with both
    /// coefficients.
    pub fn first_difference(&self, other: &TensorElement) -> Option<(String, Q, Q)> {
        let keys: std::collections::BTreeSet<&Key> =
            self.terms.keys().chain(other.terms.keys()).collect();
        for k in keys {
            let a = self.terms.get(k).cloned().unwrap_or_else(Q::zero);
            let b = other.terms.get(k).cloned().unwrap_or_else(Q::zero);
            if a != b {
                return Some((render_key(k), a, b));
            }
        }
        None
    }

    pub fn to_doc(&self) -> TensorDoc {
        TensorDoc {
            outer_arity: self.outer_arity,
            inner_arities: self.inner_arities.clone(),
            terms: self
                .terms
                .iter()
                .map(|((o, i), c)| TensorTermDoc {
                    outer: o.into(),
                    inner: i.iter().map(Into::into).collect(),
                    coeff: fmt_rational(c),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &TensorDoc) -> Result<TensorElement, LocalFnError> {
        use crate::localfn::json_monomial;
        let mut t = Self::zero(doc.outer_arity, doc.inner_arities.clone());
        for term in &doc.terms {
            let bad = |what: &str| LocalFnError::Schema(format!("tensor term: {what}"));
            if term.outer.len() != doc.outer_arity || term.inner.len() != doc.inner_arities.len() {
                return Err(bad("arity mismatch"));
            }
            let outer = json_monomial(&term.outer)?;
            let mut inner = Vec::new();
            for (docs, &a) in term.inner.iter().zip(&doc.inner_arities) {
                if docs.len() != a {
                    return Err(bad("inner arity mismatch"));
                }
                inner.push(json_monomial(docs)?);
            }
            let c = parse_rational(&term.coeff).map_err(|e| bad(&e.to_string()))?;
            t.add_term(outer, inner, c);
        }
        Ok(t)
    }
}

fn render_key((o, i): &Key) -> String {
    std::iter::once(o)
        .chain(i.iter())
        .map(|m| format!("[{m}]"))
        .collect::<Vec<_>>()
        .join(" ⊗ ")
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| format!("{} * {}", fmt_rational(c), render_key(k)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorDoc {
    pub outer_arity: usize,
    pub inner_arities: Vec<usize>,
    pub terms: Vec<TensorTermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorTermDoc {
    pub outer: Vec<FactorDoc>,
    pub inner: Vec<Vec<FactorDoc>>,
    pub coeff: String,
}

#[cfg(test)]
mod tests;
