use std::collections::BTreeMap;

use num_traits::One;

use super::canon::{canonicalize_terms, RawTerm};
use super::{Factor, LocalFn, LocalMonomial};
use crate::rational::binom;
use crate::Q;

/// All basis monomials of arity `n` with grading exactly `grading` and
/// total pole order at most `pole_budget`, in canonical order.
pub fn basis_monomials(n: usize, grading: i64, pole_budget: u32) -> Vec<LocalMonomial> {
    let mut out = Vec::new();
    let mut shape = Vec::with_capacity(n);
    pole_shapes(n, pole_budget, &mut shape, &mut |shape| {
        let poles: i64 = shape
            .iter()
            .map(|f: &Option<(usize, u32)>| f.map_or(0, |(_, k)| k as i64))
            .sum();
        let pure_total = poles - grading;
        if pure_total < 0 {
            return;
        }
        let free: Vec<usize> = (0..n).filter(|&m| shape[m].is_none()).collect();
        if free.is_empty() {
            if pure_total == 0 {
                out.push(build(shape, &[]));
            }
            return;
        }
        for split in compositions(pure_total as u32, free.len()) {
            out.push(build(shape, &split));
        }
    });
    out.sort();
    out
}

fn build(shape: &[Option<(usize, u32)>], pure: &[u32]) -> LocalMonomial {
    let mut it = pure.iter();
    LocalMonomial::new(
        shape
            .iter()
            .map(|s| match s {
                Some((base, order)) => Factor::Diff {
                    base: *base,
                    order: *order,
                },
                None => Factor::Pure(*it.next().unwrap()),
            })
            .collect(),
    )
}

fn pole_shapes(
    n: usize,
    budget: u32,
    shape: &mut Vec<Option<(usize, u32)>>,
    emit: &mut dyn FnMut(&[Option<(usize, u32)>]),
) {
    let m = shape.len();
    if m == n {
        emit(shape);
        return;
    }
    shape.push(None);
    pole_shapes(n, budget, shape, emit);
    shape.pop();
    for base in 0..m {
        for order in 1..=budget {
            shape.push(Some((base, order)));
            pole_shapes(n, budget - order, shape, emit);
            shape.pop();
        }
    }
}

/// Weak compositions of `total` into `parts` nonnegative parts.
pub(crate) fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

type Series = Vec<(i64, RawTerm, Q)>;

enum FactorSeries {
    Finite(Series),
    // geometric expansion of a difference factor at variable `m`, starting at e^0
    Geometric { m: usize, factor: Factor },
}

impl FactorSeries {
    fn min_order(&self) -> i64 {
        match self {
            FactorSeries::Finite(s) => s.iter().map(|x| x.0).min().unwrap_or(0),
            FactorSeries::Geometric { .. } => 0,
        }
    }
}

/// Laurent expansion of `f` after substituting `z_hi = z_lo + e`, keeping
/// powers `e^r` with `r <= max_order`. Coefficients are local functions in
/// which `z_hi` no longer occurs.
pub fn divisor_expansion(
    f: &LocalFn,
    lo: usize,
    hi: usize,
    max_order: i64,
) -> BTreeMap<i64, LocalFn> {
    assert!(lo < hi && hi < f.arity());
    let n = f.arity();
    let mut by_order: BTreeMap<i64, Vec<(RawTerm, Q)>> = BTreeMap::new();
    for (mono, c) in f.terms() {
        let pieces: Vec<FactorSeries> = mono
            .factors()
            .iter()
            .enumerate()
            .map(|(m, fac)| factor_series(n, lo, hi, m, fac))
            .collect();
        let total_min: i64 = pieces.iter().map(FactorSeries::min_order).sum();
        let mut acc: Series = vec![(0, RawTerm::one(n), c.clone())];
        for piece in &pieces {
            let cap = max_order - (total_min - piece.min_order());
            let series = match piece {
                FactorSeries::Finite(s) => s.clone(),
                FactorSeries::Geometric { m, factor } => {
                    (0..=cap).map(|r| diff_term(n, lo, hi, *m, factor, r)).collect()
                }
            };
            let mut next = Vec::new();
            for (e1, t1, c1) in &acc {
                for (e2, t2, c2) in series.iter().filter(|s| s.0 <= cap) {
                    next.push((e1 + e2, t1.mul(t2), c1 * c2));
                }
            }
            acc = next;
        }
        for (e, t, c) in acc {
            if e <= max_order {
                by_order.entry(e).or_default().push((t, c));
            }
        }
    }
    by_order
        .into_iter()
        .map(|(e, items)| (e, canonicalize_terms(n, items)))
        .collect()
}

fn factor_series(n: usize, lo: usize, hi: usize, m: usize, fac: &Factor) -> FactorSeries {
    match *fac {
        Factor::Pure(l) if m == hi => FactorSeries::Finite(
            (0..=l as i64)
                .map(|r| {
                    let mut t = RawTerm::one(n);
                    t.pure[lo] = l - r as u32;
                    (r, t, binom(l as i64, r))
                })
                .collect(),
        ),
        Factor::Diff { base, order } if m == hi && base == lo => {
            FactorSeries::Finite(vec![(-(order as i64), RawTerm::one(n), Q::one())])
        }
        Factor::Diff { base, .. } if m == hi || base == hi => FactorSeries::Geometric {
            m,
            factor: fac.clone(),
        },
        _ => {
            let mut t = RawTerm::one(n);
            match *fac {
                Factor::Pure(l) => t.pure[m] = l,
                Factor::Diff { base, order } => t.add_pole(m, base, order),
            }
            FactorSeries::Finite(vec![(0, t, Q::one())])
        }
    }
}

// r-th term of the expansion of a difference factor touching z_hi.
fn diff_term(n: usize, lo: usize, hi: usize, m: usize, fac: &Factor, r: i64) -> (i64, RawTerm, Q) {
    let Factor::Diff { base, order } = *fac else {
        unreachable!("only difference factors are expanded")
    };
    let k = order as i64;
    if m == hi {
        // (z_lo - z_base + e)^{-k}
        let (t, s) = RawTerm::inverse_difference(n, lo, base, (k + r) as u32);
        (r, t, binom(-k, r) * s)
    } else {
        // (z_m - z_lo - e)^{-k}
        let (t, s) = RawTerm::inverse_difference(n, m, lo, (k + r) as u32);
        let sg = if r % 2 == 0 { Q::one() } else { -Q::one() };
        (r, t, binom(-k, r) * s * sg)
    }
}
