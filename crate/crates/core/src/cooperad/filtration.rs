use serde::{Deserialize, Serialize};

use super::insert::check_subset;
use super::CooperadError;
use crate::localfn::{compositions, Factor, LocalFn, LocalMonomial};

/// Sorts `(n; n_1..n_m)` of an element of the sorted co-operad; such
/// elements have grading `n_1 + .. + n_m - n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortSignature {
    pub out_sort: i64,
    pub in_sorts: Vec<i64>,
}

impl SortSignature {
    pub fn new(out_sort: i64, in_sorts: Vec<i64>) -> Self {
        SortSignature { out_sort, in_sorts }
    }

    pub fn grading(&self) -> i64 {
        self.in_sorts.iter().sum::<i64>() - self.out_sort
    }
}

/// Least `N` with `f` in the span of `N`-regular functions for the chosen
/// variables.
///
/// With the chosen variables moved to the top of the variable order, the
/// canonical monomials whose chosen-to-chosen poles total at most `N` span
/// that space, so the level is the largest such total over the terms of `f`.
/// The sum of pairwise pole orders is only an upper bound: the three-term
/// Wick sum of `(z_i - z_j)^-2` products has level 4 on all four variables,
/// not 12.
pub fn filtration_level(f: &LocalFn, subset: &[usize]) -> Result<u32, CooperadError> {
    check_subset(subset, f.arity())?;
    Ok(level_unchecked(f, subset))
}

fn level_unchecked(f: &LocalFn, subset: &[usize]) -> u32 {
    let n = f.arity();
    let mut chosen = vec![false; n];
    for &v in subset {
        chosen[v] = true;
    }
    let mut target = vec![0; n];
    let mut next = 0;
    for pass in [false, true] {
        for v in 0..n {
            if chosen[v] == pass {
                target[v] = next;
                next += 1;
            }
        }
    }
    let top = n - subset.len();
    f.substitute(n, &target)
        .terms()
        .map(|(m, _)| {
            m.factors()
                .iter()
                .enumerate()
                .filter(|&(v, _)| v >= top)
                .map(|(_, fac)| match *fac {
                    Factor::Diff { base, order } if base >= top => order,
                    _ => 0,
                })
                .sum::<u32>()
        })
        .max()
        .unwrap_or(0)
}

/// Basis monomials of grading `grading`, total pole order at most
/// `pole_budget`, whose poles between chosen variables have total order at
/// most `level`. Built variable by variable: a pole from a chosen variable to
/// a lower chosen one spends the level budget, any other pole does not.
pub fn filtration_basis(
    n: usize,
    subset: &[usize],
    level: u32,
    grading: i64,
    pole_budget: u32,
) -> Result<Vec<LocalMonomial>, CooperadError> {
    check_subset(subset, n)?;
    let mut chosen = vec![false; n];
    for &v in subset {
        chosen[v] = true;
    }
    let mut out = Vec::new();
    let mut shape = Vec::with_capacity(n);
    shapes(&chosen, pole_budget, level, &mut shape, &mut |shape| {
        let poles: i64 = shape.iter().map(|s| s.map_or(0, |(_, k)| k as i64)).sum();
        let pure_total = poles - grading;
        if pure_total < 0 {
            return;
        }
        let free = shape.iter().filter(|s| s.is_none()).count();
        for split in compositions(pure_total as u32, free) {
            let mut it = split.into_iter();
            out.push(LocalMonomial::new(
                shape
                    .iter()
                    .map(|s| match *s {
                        Some((base, order)) => Factor::Diff { base, order },
                        None => Factor::Pure(it.next().unwrap()),
                    })
                    .collect(),
            ));
        }
    });
    out.sort();
    Ok(out)
}

fn shapes(
    chosen: &[bool],
    poles_left: u32,
    level_left: u32,
    shape: &mut Vec<Option<(usize, u32)>>,
    emit: &mut dyn FnMut(&[Option<(usize, u32)>]),
) {
    let v = shape.len();
    if v == chosen.len() {
        emit(shape);
        return;
    }
    shape.push(None);
    shapes(chosen, poles_left, level_left, shape, emit);
    shape.pop();
    for base in 0..v {
        let spends = chosen[v] && chosen[base];
        let cap = if spends {
            poles_left.min(level_left)
        } else {
            poles_left
        };
        for order in 1..=cap {
            shape.push(Some((base, order)));
            let lvl = if spends { level_left - order } else { level_left };
            shapes(chosen, poles_left - order, lvl, shape, emit);
            shape.pop();
        }
    }
}

/// Membership in `W_k` for the given sorts: `f` is homogeneous of grading
/// `n_1 + .. + n_m - n`, and for every nonempty set `I` of variables its
/// level is at most `-k + sum_{i in I} n_i`.
pub fn in_connective(f: &LocalFn, k: i64, sig: &SortSignature) -> bool {
    let m = f.arity();
    if sig.in_sorts.len() != m {
        return false;
    }
    if f.is_zero() {
        return true;
    }
    if f.homogeneous_grading() != Some(sig.grading()) {
        return false;
    }
    (1u64..(1 << m)).all(|mask| {
        let members: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let level = level_unchecked(f, &members) as i64;
        let bound: i64 = -k + members.iter().map(|&i| sig.in_sorts[i]).sum::<i64>();
        level <= bound
    })
}
