//! Reduction of products of `z_m` and inverse differences to the monomial basis.
//!
//! A [`RawTerm`] is an arbitrary product `prod z_m^{a_m} * prod (z_hi - z_lo)^{-k}`.
//! Canonicalization works one variable at a time from the highest index down,
//! applying partial fractions in that variable until it carries at most one
//! factor, then moves the leftover coefficients (which only involve lower
//! variables) to the next level.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{Factor, LocalFn, LocalMonomial};
use crate::Q;

/// Unreduced product term. `poles[(hi, lo)] = k` stands for `(z_hi - z_lo)^{-k}`, `lo < hi`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawTerm {
    pub pure: Vec<u32>,
    pub poles: BTreeMap<(usize, usize), u32>,
}

impl RawTerm {
    pub fn one(arity: usize) -> Self {
        RawTerm {
            pure: vec![0; arity],
            poles: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.pure.len()
    }

    pub fn var(arity: usize, m: usize) -> Self {
        let mut t = Self::one(arity);
        t.pure[m] = 1;
        t
    }

    /// `(z_i - z_j)^{-k}` for `i != j`, returned together with the sign needed
    /// to orient the difference as `(z_hi - z_lo)`.
    pub fn inverse_difference(arity: usize, i: usize, j: usize, k: u32) -> (Self, Q) {
        let mut t = Self::one(arity);
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        t.poles.insert((hi, lo), k);
        let sign = if i > j || k % 2 == 0 { Q::one() } else { -Q::one() };
        (t, sign)
    }

    pub fn from_monomial(m: &LocalMonomial) -> Self {
        let mut t = Self::one(m.arity());
        for (var, f) in m.factors().iter().enumerate() {
            match *f {
                Factor::Pure(l) => t.pure[var] = l,
                Factor::Diff { base, order } => {
                    t.poles.insert((var, base), order);
                }
            }
        }
        t
    }

    pub fn mul(&self, other: &RawTerm) -> RawTerm {
        let mut out = self.clone();
        for (a, b) in out.pure.iter_mut().zip(&other.pure) {
            *a += b;
        }
        for (key, k) in &other.poles {
            *out.poles.entry(*key).or_insert(0) += k;
        }
        out
    }

    pub fn add_pole(&mut self, hi: usize, lo: usize, k: u32) {
        debug_assert!(lo < hi);
        if k > 0 {
            *self.poles.entry((hi, lo)).or_insert(0) += k;
        }
    }

    fn set_pole(&mut self, hi: usize, lo: usize, k: u32) {
        if k == 0 {
            self.poles.remove(&(hi, lo));
        } else {
            self.poles.insert((hi, lo), k);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Pending {
    raw: RawTerm,
    // factors already fixed for levels above the current one, highest first
    done: Vec<Factor>,
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, Q>, key: K, c: Q) {
    if c.is_zero() {
        return;
    }
    let entry = map.entry(key).or_insert_with(Q::zero);
    *entry += c;
}

/// Sum of raw terms in canonical form.
pub fn canonicalize_terms<I>(arity: usize, items: I) -> LocalFn
where
    I: IntoIterator<Item = (RawTerm, Q)>,
{
    let mut level: BTreeMap<Pending, Q> = BTreeMap::new();
    for (raw, c) in items {
        debug_assert_eq!(raw.arity(), arity);
        accumulate(
            &mut level,
            Pending {
                raw,
                done: Vec::new(),
            },
            c,
        );
    }
    for m in (0..arity).rev() {
        level = reduce_level(level, m);
    }
    let mut out = LocalFn::zero(arity);
    for (p, c) in level {
        if c.is_zero() {
            continue;
        }
        let mut factors = p.done;
        factors.reverse();
        out.add_term(LocalMonomial::new(factors), c);
    }
    out
}

fn reduce_level(mut queue: BTreeMap<Pending, Q>, m: usize) -> BTreeMap<Pending, Q> {
    let mut next = BTreeMap::new();
    while let Some((mut p, c)) = queue.pop_first() {
        if c.is_zero() {
            continue;
        }
        let a = p.raw.pure[m];
        let poles: Vec<(usize, u32)> = p
            .raw
            .poles
            .range((m, 0)..(m + 1, 0))
            .map(|(&(_, lo), &k)| (lo, k))
            .collect();
        match (a, poles.as_slice()) {
            (_, []) => {
                p.raw.pure[m] = 0;
                p.done.push(Factor::Pure(a));
                accumulate(&mut next, p, c);
            }
            (0, [(lo, k)]) => {
                p.raw.poles.remove(&(m, *lo));
                p.done.push(Factor::Diff {
                    base: *lo,
                    order: *k,
                });
                accumulate(&mut next, p, c);
            }
            (_, [(lo, k), ..]) if a > 0 => {
                // z_m = (z_m - z_lo) + z_lo
                let mut t1 = p.clone();
                t1.raw.pure[m] -= 1;
                t1.raw.set_pole(m, *lo, k - 1);
                let mut t2 = p;
                t2.raw.pure[m] -= 1;
                t2.raw.pure[*lo] += 1;
                accumulate(&mut queue, t1, c.clone());
                accumulate(&mut queue, t2, c);
            }
            (_, [(i, k), (j, l), ..]) => {
                // (z_m-z_i)^-1 (z_m-z_j)^-1 = -(z_j-z_i)^-1 [(z_m-z_i)^-1 - (z_m-z_j)^-1]
                let mut t1 = p.clone();
                t1.raw.set_pole(m, *j, l - 1);
                t1.raw.add_pole(*j, *i, 1);
                let mut t2 = p;
                t2.raw.set_pole(m, *i, k - 1);
                t2.raw.add_pole(*j, *i, 1);
                accumulate(&mut queue, t1, -c.clone());
                accumulate(&mut queue, t2, c);
            }
            _ => unreachable!("two or more poles are handled above"),
        }
    }
    next
}

/// Multiplies two sparse raw polynomials.
pub fn mul_raw(
    a: &BTreeMap<RawTerm, Q>,
    b: &BTreeMap<RawTerm, Q>,
) -> BTreeMap<RawTerm, Q> {
    let mut out = BTreeMap::new();
    for (ta, ca) in a {
        for (tb, cb) in b {
            accumulate(&mut out, ta.mul(tb), ca * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn add_raw_into(acc: &mut BTreeMap<RawTerm, Q>, other: &BTreeMap<RawTerm, Q>, scale: &Q) {
    for (t, c) in other {
        accumulate(acc, t.clone(), c * scale);
    }
    acc.retain(|_, c| !c.is_zero());
}
