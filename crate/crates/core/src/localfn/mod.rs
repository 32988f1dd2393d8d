//! Local functions: rational functions of `z_1..z_n` regular away from the
//! diagonals `z_i = z_j`.
//!
//! Every local function has a unique expansion in the monomial basis built
//! variable by variable: variable `z_m` contributes exactly one factor, either
//! `z_m^l` with `l >= 0` or `(z_m - z_i)^{-k}` with `i < m`, `k >= 1`.
//! [`LocalFn`] stores that expansion, so equality of values is equality of
//! functions.
//!
//! Indices are zero-based in the API; text and JSON forms use `z1..zn`.

mod basis;
pub mod canon;
mod expr;
mod json;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{fmt_rational, sign};
use crate::Q;

pub use basis::{basis_monomials, divisor_expansion};
pub(crate) use basis::compositions;
pub(crate) use json::monomial_from_docs as json_monomial;
pub use canon::{canonicalize_terms, RawTerm};
pub use expr::{parse, RawExpr};
pub use json::{FactorDoc, LocalFnDoc, TermDoc};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalFnError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("negative power on a non-difference subexpression at offset {pos}")]
    IllegalPole { pos: usize },
    #[error("variable z{index} is outside z1..z{arity}")]
    BadIndex { index: usize, arity: usize },
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("not a permutation of {0} elements")]
    BadPermutation(usize),
    #[error("coincident evaluation points z{0} = z{1}")]
    CoincidentPoints(usize, usize),
    #[error("expected {expected} evaluation points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("bad variable pair ({0}, {1})")]
    BadPair(usize, usize),
    #[error("malformed local function document: {0}")]
    Schema(String),
}

/// The factor contributed by one variable.
///
/// `Diff { base, order }` at variable `m` is `(z_m - z_base)^{-order}`; the
/// derived ordering puts these before pure powers, as the canonical print
/// order requires.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Diff { base: usize, order: u32 },
    Pure(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalMonomial {
    factors: Vec<Factor>,
}

impl LocalMonomial {
    /// Panics if a `Diff` base is not below its variable or has order zero.
    pub fn new(factors: Vec<Factor>) -> Self {
        for (m, f) in factors.iter().enumerate() {
            if let Factor::Diff { base, order } = f {
                assert!(*base < m && *order > 0, "invalid factor {f:?} at z{}", m + 1);
            }
        }
        LocalMonomial { factors }
    }

    pub fn one(arity: usize) -> Self {
        LocalMonomial {
            factors: vec![Factor::Pure(0); arity],
        }
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Degree under `z -> a z`.
    pub fn scaling_degree(&self) -> i64 {
        self.factors
            .iter()
            .map(|f| match f {
                Factor::Pure(l) => *l as i64,
                Factor::Diff { order, .. } => -(*order as i64),
            })
            .sum()
    }

    /// Grading: the negative of the scaling degree.
    pub fn grading(&self) -> i64 {
        -self.scaling_degree()
    }

    pub fn total_pole_order(&self) -> u32 {
        self.factors
            .iter()
            .map(|f| match f {
                Factor::Diff { order, .. } => *order,
                Factor::Pure(_) => 0,
            })
            .sum()
    }

    /// Pole order of this single monomial along `z_i = z_j`.
    pub fn pair_order(&self, i: usize, j: usize) -> u32 {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        match self.factors[hi] {
            Factor::Diff { base, order } if base == lo => order,
            _ => 0,
        }
    }

    pub fn evaluate(&self, points: &[Q]) -> Q {
        let mut acc = Q::one();
        for (m, f) in self.factors.iter().enumerate() {
            match f {
                Factor::Pure(l) => acc *= pow(&points[m], *l as i32),
                Factor::Diff { base, order } => {
                    acc *= pow(&(&points[m] - &points[*base]), -(*order as i32))
                }
            }
        }
        acc
    }
}

fn pow(x: &Q, e: i32) -> Q {
    num_traits::Pow::pow(x.clone(), e)
}

impl PartialOrd for LocalMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LocalMonomial {
    // Highest variable first, matching the order in which the basis is built.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.arity().cmp(&other.arity()).then_with(|| {
            self.factors
                .iter()
                .rev()
                .cmp(other.factors.iter().rev())
        })
    }
}

impl fmt::Display for LocalMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .enumerate()
            .filter_map(|(m, fac)| match fac {
                Factor::Pure(0) => None,
                Factor::Pure(1) => Some(format!("z{}", m + 1)),
                Factor::Pure(l) => Some(format!("z{}^{}", m + 1, l)),
                Factor::Diff { base, order } => {
                    Some(format!("(z{}-z{})^-{}", m + 1, base + 1, order))
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}

/// A local function in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalFn {
    arity: usize,
    terms: BTreeMap<LocalMonomial, Q>,
}

/// A permutation of `0..n`, `images[i] = sigma(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, LocalFnError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(LocalFnError::BadPermutation(n));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self` first, then `other`: `i -> other(self(i))`.
    ///
    /// With this product the action is a right action:
    /// `f.permute(s).permute(t) == f.permute(&s.then(&t))`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &s) in self.images.iter().enumerate() {
            images[s] = i;
        }
        Permutation { images }
    }
}

impl LocalFn {
    pub fn zero(arity: usize) -> Self {
        LocalFn {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Q::one())
    }

    pub fn constant(arity: usize, c: Q) -> Self {
        let mut f = Self::zero(arity);
        f.add_term(LocalMonomial::one(arity), c);
        f
    }

    pub fn monomial(m: LocalMonomial) -> Self {
        let mut f = Self::zero(m.arity());
        f.add_term(m, Q::one());
        f
    }

    /// `z_m` (zero-based `m`).
    pub fn var(arity: usize, m: usize) -> Self {
        let mut factors = vec![Factor::Pure(0); arity];
        factors[m] = Factor::Pure(1);
        Self::monomial(LocalMonomial::new(factors))
    }

    /// `(z_i - z_j)^{-k}` in canonical form.
    pub fn inverse_difference(arity: usize, i: usize, j: usize, k: u32) -> Self {
        let (t, s) = RawTerm::inverse_difference(arity, i, j, k);
        canonicalize_terms(arity, [(t, s)])
    }

    pub fn from_terms<I: IntoIterator<Item = (LocalMonomial, Q)>>(arity: usize, it: I) -> Self {
        let mut f = Self::zero(arity);
        for (m, c) in it {
            assert_eq!(m.arity(), arity);
            f.add_term(m, c);
        }
        f
    }

    pub(crate) fn add_term(&mut self, m: LocalMonomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LocalMonomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &LocalMonomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    fn check_arity(&self, other: &LocalFn) -> Result<(), LocalFnError> {
        if self.arity != other.arity {
            return Err(LocalFnError::ArityMismatch(self.arity, other.arity));
        }
        Ok(())
    }

    pub fn add(&self, other: &LocalFn) -> Result<LocalFn, LocalFnError> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LocalFn) -> Result<LocalFn, LocalFnError> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> LocalFn {
        if c.is_zero() {
            return LocalFn::zero(self.arity);
        }
        LocalFn {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &LocalFn) -> Result<LocalFn, LocalFnError> {
        self.check_arity(other)?;
        let raws: Vec<(RawTerm, Q)> = self
            .terms
            .iter()
            .flat_map(|(ma, ca)| {
                let ra = RawTerm::from_monomial(ma);
                other
                    .terms
                    .iter()
                    .map(move |(mb, cb)| (ra.mul(&RawTerm::from_monomial(mb)), ca * cb))
            })
            .collect();
        Ok(canonicalize_terms(self.arity, raws))
    }

    /// `f sigma (z_1..z_n) = f(z_{sigma(1)}, .., z_{sigma(n)})`.
    pub fn permute(&self, sigma: &Permutation) -> Result<LocalFn, LocalFnError> {
        if sigma.len() != self.arity {
            return Err(LocalFnError::BadPermutation(self.arity));
        }
        Ok(self.substitute(self.arity, sigma.images()))
    }

    /// Renames variable `m` to `target[m]` in a space of arity `new_arity`.
    /// `target` must be injective.
    pub fn substitute(&self, new_arity: usize, target: &[usize]) -> LocalFn {
        let raws = self.terms.iter().map(|(m, c)| {
            let (t, s) = substitute_monomial(m, new_arity, target);
            (t, c * s)
        });
        canonicalize_terms(new_arity, raws.collect::<Vec<_>>())
    }

    /// Homogeneous pieces keyed by grading.
    pub fn grade_components(&self) -> BTreeMap<i64, LocalFn> {
        let mut out: BTreeMap<i64, LocalFn> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.grading())
                .or_insert_with(|| LocalFn::zero(self.arity))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// The grading if `self` is nonzero and homogeneous.
    pub fn homogeneous_grading(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(LocalMonomial::grading);
        let g = it.next()?;
        it.all(|h| h == g).then_some(g)
    }

    pub fn evaluate(&self, points: &[Q]) -> Result<Q, LocalFnError> {
        if points.len() != self.arity {
            return Err(LocalFnError::PointCount {
                expected: self.arity,
                got: points.len(),
            });
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(LocalFnError::CoincidentPoints(i + 1, j + 1));
                }
            }
        }
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| c * m.evaluate(points))
            .fold(Q::zero(), |a, b| a + b))
    }

    /// Least `d >= 0` with `(z_j - z_i)^d f` regular along `z_i = z_j`.
    ///
    /// Computed from the Laurent expansion of `f` in `e` after substituting
    /// `z_hi = z_lo + e`: the coefficient of each negative power of `e` is a
    /// local function of the remaining variables, reduced to canonical form
    /// and tested for zero. This is the multiplicity count of `(z_j - z_i)` in
    /// the numerator over the common denominator, without expanding it.
    pub fn pole_order(&self, i: usize, j: usize) -> Result<u32, LocalFnError> {
        if i == j || i >= self.arity || j >= self.arity {
            return Err(LocalFnError::BadPair(i, j));
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let max = self
            .terms
            .keys()
            .map(|m| m.pair_order(lo, hi))
            .max()
            .unwrap_or(0);
        if max == 0 {
            return Ok(0);
        }
        let series = divisor_expansion(self, lo, hi, -1);
        for e in -(max as i64)..0 {
            if let Some(coeff) = series.get(&e) {
                if !coeff.is_zero() {
                    return Ok((-e) as u32);
                }
            }
        }
        Ok(0)
    }
}

fn substitute_monomial(m: &LocalMonomial, new_arity: usize, target: &[usize]) -> (RawTerm, Q) {
    let mut t = RawTerm::one(new_arity);
    let mut s = Q::one();
    for (var, f) in m.factors().iter().enumerate() {
        let v = target[var];
        match *f {
            Factor::Pure(l) => t.pure[v] += l,
            Factor::Diff { base, order } => {
                let b = target[base];
                if v > b {
                    t.add_pole(v, b, order);
                } else {
                    t.add_pole(b, v, order);
                    s *= sign(order as i64);
                }
            }
        }
    }
    (t, s)
}

impl fmt::Display for LocalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let body = if m.factors.iter().all(|x| *x == Factor::Pure(0)) {
                None
            } else {
                Some(m.to_string())
            };
            let mag = fmt_rational(&c.abs());
            let text = match body {
                Some(b) => format!("{mag} * {b}"),
                None => mag,
            };
            match (idx, c.is_negative()) {
                (0, false) => write!(f, "{text}")?,
                (0, true) => write!(f, "-{text}")?,
                (_, false) => write!(f, " + {text}")?,
                (_, true) => write!(f, " - {text}")?,
            }
        }
        Ok(())
    }
}

/// Parses and canonicalizes in one step.
pub fn canonicalize_str(text: &str, arity: usize) -> Result<LocalFn, LocalFnError> {
    Ok(parse(text, arity)?.canonicalize())
}
