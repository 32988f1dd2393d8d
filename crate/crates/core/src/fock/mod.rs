//! Free boson Fock space, its Sugawara Virasoro action and the rank-one
//! lattice vertex operators, written directly in terms of oscillators.
//!
//! A basis state is a multiset of positive parts `k` (the creation operator
//! `alpha_{-k}`, one per part) together with a lattice label `l`, standing for
//! `alpha_{-k_1} .. alpha_{-k_s} e^{l lambda}`. The bilinear form is
//! `<lambda, lambda> = norm`, so `[alpha_m, alpha_n] = norm * m * delta_{m+n,0}`.
//!
//! Vertex algebra mode `a(n)` is `alpha_n`, and `L(n)` is `L_{n-1}`.

mod series;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{factorial, fmt_rational, parse_rational, q, sign};
use crate::Q;

pub use series::{realization_dims, series_dims, SeriesKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FockError {
    #[error("result needs weight {needed}, above the truncation {cutoff}")]
    TruncationTooSmall { needed: i64, cutoff: i64 },
    #[error("bad state document: {0}")]
    BadDoc(String),
}

/// Sorted parts (non-decreasing) and a lattice label.
pub type FockKey = (Vec<u32>, i64);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockState {
    terms: BTreeMap<FockKey, Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockTermDoc {
    pub parts: Vec<u32>,
    pub label: i64,
    pub coeff: String,
}

impl FockState {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::basis(vec![], 0)
    }

    pub fn basis(mut parts: Vec<u32>, label: i64) -> Self {
        parts.sort_unstable();
        let mut s = Self::zero();
        s.terms.insert((parts, label), Q::one());
        s
    }

    pub fn add_term(&mut self, key: FockKey, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &FockState, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (k, a) in &other.terms {
            self.add_term(k.clone(), a * c);
        }
    }

    pub fn scale(&self, c: &Q) -> FockState {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &FockState) -> FockState {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockKey, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, parts: &[u32], label: i64) -> Q {
        self.terms
            .get(&(parts.to_vec(), label))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    /// Largest weight among the terms, or `None` for the zero state.
    pub fn max_weight(&self, norm: i64) -> Option<i64> {
        self.terms.keys().map(|k| key_weight(k, norm)).max()
    }

    pub fn to_doc(&self) -> Vec<FockTermDoc> {
        self.terms
            .iter()
            .map(|((parts, label), c)| FockTermDoc {
                parts: parts.clone(),
                label: *label,
                coeff: fmt_rational(c),
            })
            .collect()
    }

    pub fn from_doc(doc: &[FockTermDoc]) -> Result<FockState, FockError> {
        let mut s = Self::zero();
        for t in doc {
            if t.parts.contains(&0) {
                return Err(FockError::BadDoc("parts must be positive".into()));
            }
            let c = parse_rational(&t.coeff).map_err(|e| FockError::BadDoc(e.to_string()))?;
            let mut parts = t.parts.clone();
            parts.sort_unstable();
            s.add_term((parts, t.label), c);
        }
        Ok(s)
    }
}

/// `sum parts + norm * l^2 / 2`.
pub fn key_weight(key: &FockKey, norm: i64) -> i64 {
    key.0.iter().map(|&k| k as i64).sum::<i64>() + norm * key.1 * key.1 / 2
}

/// `alpha_n` on a state.
pub fn alpha_act(norm: i64, n: i64, s: &FockState) -> FockState {
    let mut out = FockState::zero();
    for ((parts, label), c) in s.terms() {
        if n < 0 {
            let mut p = parts.clone();
            let at = p.partition_point(|&x| (x as i64) <= -n);
            p.insert(at, (-n) as u32);
            out.add_term((p, *label), c.clone());
        } else if n == 0 {
            out.add_term((parts.clone(), *label), c * q(norm * label));
        } else {
            let mult = parts.iter().filter(|&&x| x as i64 == n).count() as i64;
            if mult == 0 {
                continue;
            }
            let mut p = parts.clone();
            let at = p.iter().position(|&x| x as i64 == n).unwrap();
            p.remove(at);
            out.add_term((p, *label), c * q(norm * n * mult));
        }
    }
    out
}

/// `L(n) = L_{n-1}` from the normal-ordered quadratic
/// `L_m = 1/(2 norm) sum_a :alpha_a alpha_{m-a}:`, central charge 1.
pub fn virasoro_act(norm: i64, n: i64, s: &FockState) -> FockState {
    let m = n - 1;
    let reach = s.max_weight(norm).unwrap_or(0) + m.abs() + 1;
    let mut out = FockState::zero();
    for a in -reach..=reach {
        let b = m - a;
        // annihilators to the right
        let (left, right) = if a <= b { (a, b) } else { (b, a) };
        let t = alpha_act(norm, left, &alpha_act(norm, right, s));
        out.add_scaled(&t, &Q::one());
    }
    out.scale(&(Q::one() / q(2 * norm)))
}

/// The mode `n` of the vertex operator of `e^{k lambda}`:
/// `Y(e^{k lambda}, z) = e^{k lambda} z^{k lambda_0} E^-(z) E^+(z) eps`,
/// with `eps(k lambda, l lambda) = (-1)^{k l}`.
///
/// Fails if the image has a component above weight `cutoff`.
pub fn lattice_vertex_act(
    norm: i64,
    k: i64,
    n: i64,
    s: &FockState,
    cutoff: i64,
) -> Result<FockState, FockError> {
    let mut out = FockState::zero();
    for (key, c) in s.terms() {
        let label = key.1;
        let needed = key_weight(key, norm) + norm * k * k / 2 - n - 1;
        if needed < 0 {
            continue;
        }
        if needed > cutoff {
            return Err(FockError::TruncationTooSmall { needed, cutoff });
        }
        let single = FockState::basis(key.0.clone(), label);
        let cocycle = sign(k * label);
        for (d, lowered) in annihilation(norm, k, &single) {
            // z^{k norm l} z^{-d} z^{c} = z^{-n-1}
            let create = -n - 1 - k * norm * label + d;
            if create < 0 {
                continue;
            }
            let raised = creation(norm, k, create as u32, &lowered);
            for ((parts, l), a) in raised.terms() {
                out.add_term((parts.clone(), l + k), a * c * &cocycle);
            }
        }
    }
    Ok(out)
}

// exp(-k sum_{j>0} alpha_j z^{-j} / j) s, grouped by the power of z^{-1}
fn annihilation(norm: i64, k: i64, s: &FockState) -> BTreeMap<i64, FockState> {
    let mut acc = BTreeMap::from([(0i64, s.clone())]);
    let top = s.terms().flat_map(|(key, _)| key.0.iter().copied()).max().unwrap_or(0);
    for j in 1..=top as i64 {
        let mut next: BTreeMap<i64, FockState> = BTreeMap::new();
        for (d, st) in &acc {
            let mut cur = st.clone();
            let mut pow = 0u64;
            while !cur.is_zero() {
                let c = pow_q(&(q(-k) / q(j)), pow) / Q::from(factorial(pow));
                next.entry(d + j * pow as i64)
                    .or_default()
                    .add_scaled(&cur, &c);
                cur = alpha_act(norm, j, &cur);
                pow += 1;
            }
        }
        acc = next;
    }
    acc.retain(|_, st| !st.is_zero());
    acc
}

// coefficient of z^c in exp(k sum_{j>0} alpha_{-j} z^j / j) applied to s
fn creation(norm: i64, k: i64, c: u32, s: &FockState) -> FockState {
    let mut out = FockState::zero();
    let mut stack: Vec<(u32, u32, Vec<u32>)> = vec![(c, c, vec![])];
    while let Some((left, max, parts)) = stack.pop() {
        if left == 0 {
            // prod_j (k/j)^{m_j} / m_j!
            let mut coeff = Q::one();
            let mut st = s.clone();
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for &p in &parts {
                *counts.entry(p).or_default() += 1;
                st = alpha_act(norm, -(p as i64), &st);
            }
            for (&j, &m) in &counts {
                coeff *= pow_q(&(q(k) / q(j as i64)), m) / Q::from(factorial(m));
            }
            out.add_scaled(&st, &coeff);
            continue;
        }
        for p in 1..=left.min(max) {
            let mut np = parts.clone();
            np.push(p);
            stack.push((left - p, p, np));
        }
    }
    out
}

fn pow_q(x: &Q, e: u64) -> Q {
    let mut r = Q::one();
    for _ in 0..e {
        r *= x;
    }
    r
}
