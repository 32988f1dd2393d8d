use std::collections::{BTreeMap, HashMap};

use num_traits::One;

use super::{CooperadError, TensorElement};
use crate::localfn::{canonicalize_terms, Factor, LocalFn, LocalMonomial, RawTerm};
use crate::rational::{binom, sign};
use crate::Q;

fn grading_of(f: &LocalFn) -> Result<Option<i64>, CooperadError> {
    if f.is_zero() {
        return Ok(None);
    }
    f.homogeneous_grading()
        .map(Some)
        .ok_or(CooperadError::NotHomogeneous)
}

/// Outer grading `p` component of the insertion splitting `z_{m+1}..z_n` off
/// around a new point `t`, with `z_{m+s} = t + t_s`.
///
/// The outer factor has variables `z_1..z_m, t`, the inner one `t_1..t_{n-m}`.
/// Indices are zero-based: `m` counts the variables that stay outside.
pub fn insert_component(f: &LocalFn, m: usize, p: i64) -> Result<TensorElement, CooperadError> {
    let n = f.arity();
    if m >= n {
        return Err(CooperadError::BadSplit { m, n });
    }
    let mut out = TensorElement::zero(m + 1, vec![n - m]);
    let Some(g) = grading_of(f)? else {
        return Ok(out);
    };
    let mut groups: BTreeMap<LocalMonomial, Vec<(RawTerm, Q)>> = BTreeMap::new();
    for (mono, c) in f.terms() {
        insert_monomial(mono, m, g - p, c, &mut groups);
    }
    for (inner, raws) in groups {
        let outer = canonicalize_terms(m + 1, raws);
        out.add_product(&outer, &[LocalFn::monomial(inner)], &Q::one());
    }
    Ok(out)
}

enum OuterBit {
    Pure(u32),
    Pole(usize, u32),
}

struct Choice {
    outer: OuterBit,
    inner: Factor,
    used: u32,
    coeff: Q,
}

fn insert_monomial(
    mono: &LocalMonomial,
    m: usize,
    q: i64,
    c: &Q,
    groups: &mut BTreeMap<LocalMonomial, Vec<(RawTerm, Q)>>,
) {
    let factors = mono.factors();
    let t = m;
    let mut fixed = RawTerm::one(m + 1);
    for (v, fac) in factors[..m].iter().enumerate() {
        match *fac {
            Factor::Pure(l) => fixed.pure[v] = l,
            Factor::Diff { base, order } => fixed.add_pole(v, base, order),
        }
    }
    let inner_poles: i64 = factors[m..]
        .iter()
        .map(|f| match *f {
            Factor::Diff { base, order } if base >= m => order as i64,
            _ => 0,
        })
        .sum();
    // total power of the t_s to distribute
    let budget = inner_poles - q;
    if budget < 0 {
        return;
    }
    let budget = budget as u32;
    let choices: Vec<Vec<Choice>> = factors[m..]
        .iter()
        .map(|fac| match *fac {
            Factor::Pure(l) => (0..=l.min(budget))
                .map(|a| Choice {
                    outer: OuterBit::Pure(l - a),
                    inner: Factor::Pure(a),
                    used: a,
                    coeff: binom(l as i64, a as i64),
                })
                .collect(),
            Factor::Diff { base, order } if base >= m => vec![Choice {
                outer: OuterBit::Pure(0),
                inner: Factor::Diff {
                    base: base - m,
                    order,
                },
                used: 0,
                coeff: Q::one(),
            }],
            // (t - z_base + t_s)^{-k} = sum_r binom(-k, r) (t - z_base)^{-k-r} t_s^r
            Factor::Diff { base, order } => (0..=budget)
                .map(|r| Choice {
                    outer: OuterBit::Pole(base, order + r),
                    inner: Factor::Pure(r),
                    used: r,
                    coeff: binom(-(order as i64), r as i64),
                })
                .collect(),
        })
        .collect();

    let mut picked = Vec::with_capacity(choices.len());
    walk(&choices, budget, &mut picked, &mut |picked: &[&Choice]| {
        let mut raw = fixed.clone();
        let mut coeff = c.clone();
        let mut inner = Vec::with_capacity(picked.len());
        for ch in picked {
            match ch.outer {
                OuterBit::Pure(e) => raw.pure[t] += e,
                OuterBit::Pole(base, k) => raw.add_pole(t, base, k),
            }
            inner.push(ch.inner.clone());
            coeff *= &ch.coeff;
        }
        groups
            .entry(LocalMonomial::new(inner))
            .or_default()
            .push((raw, coeff));
    });
}

fn walk<'a>(
    choices: &'a [Vec<Choice>],
    left: u32,
    picked: &mut Vec<&'a Choice>,
    emit: &mut dyn FnMut(&[&Choice]),
) {
    let Some((first, rest)) = choices.split_first() else {
        if left == 0 {
            emit(picked);
        }
        return;
    };
    for ch in first.iter().filter(|ch| ch.used <= left) {
        picked.push(ch);
        walk(rest, left - ch.used, picked, emit);
        picked.pop();
    }
}

/// Insertion at an arbitrary set of variables (zero-based, increasing),
/// defined by moving them to the end with [`LocalFn::substitute`].
///
/// The outer factor has the remaining variables in order followed by the
/// new point; the inner one has the chosen variables in order.
pub fn insert_at(f: &LocalFn, subset: &[usize], p: i64) -> Result<TensorElement, CooperadError> {
    let n = f.arity();
    check_subset(subset, n)?;
    let mut order: Vec<usize> = (0..n).filter(|v| !subset.contains(v)).collect();
    order.extend_from_slice(subset);
    let mut target = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        target[v] = k;
    }
    insert_component(&f.substitute(n, &target), n - subset.len(), p)
}

pub(crate) fn check_subset(subset: &[usize], n: usize) -> Result<(), CooperadError> {
    if subset.is_empty() {
        return Err(CooperadError::BadSubset("empty".into()));
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CooperadError::BadSubset(
            "indices must be strictly increasing".into(),
        ));
    }
    if subset.iter().any(|&v| v >= n) {
        return Err(CooperadError::BadSubset(format!(
            "index out of range for arity {n}"
        )));
    }
    Ok(())
}

enum BlockBit {
    Pure(usize, u32),
    Pole(usize, usize, u32),
}

struct GenChoice {
    outer: BlockBit,
    inner: Vec<(usize, BlockBit)>,
    used: Vec<(usize, u32)>,
    coeff: Q,
}

/// Multidegree `(l_0; l_1..l_k)` component of the co-composition along
/// consecutive blocks of sizes `blocks`: the j-th variable of block i becomes
/// `Z_i + t_ij`. The outer factor is in `Z_1..Z_k`, inner factor i in the
/// `t_ij`.
pub fn cocompose_general(
    f: &LocalFn,
    blocks: &[usize],
    multidegree: &[i64],
) -> Result<TensorElement, CooperadError> {
    let n = f.arity();
    if blocks.is_empty() || blocks.contains(&0) {
        return Err(CooperadError::BadPartition(format!(
            "block sizes {blocks:?} must all be positive"
        )));
    }
    if blocks.iter().sum::<usize>() != n {
        return Err(CooperadError::BadPartition(format!(
            "block sizes {blocks:?} do not sum to arity {n}"
        )));
    }
    let k = blocks.len();
    let mut out = TensorElement::zero(k, blocks.to_vec());
    let Some(g) = grading_of(f)? else {
        return Ok(out);
    };
    if multidegree.len() != k + 1 || multidegree.iter().sum::<i64>() != g {
        return Err(CooperadError::BadMultidegree {
            got: multidegree.to_vec(),
            grading: g,
        });
    }
    let mut block_of = Vec::with_capacity(n);
    let mut local = Vec::with_capacity(n);
    for (b, &size) in blocks.iter().enumerate() {
        for j in 0..size {
            block_of.push(b);
            local.push(j);
        }
    }
    let mut memo: HashMap<RawTerm, LocalFn> = HashMap::new();
    let mut canon = |raw: RawTerm| -> LocalFn {
        memo.entry(raw.clone())
            .or_insert_with(|| canonicalize_terms(raw.arity(), [(raw, Q::one())]))
            .clone()
    };

    for (mono, c) in f.terms() {
        let mut budgets: Vec<i64> = multidegree[1..].iter().map(|l| -l).collect();
        for (v, fac) in mono.factors().iter().enumerate() {
            if let Factor::Diff { base, order } = *fac {
                if block_of[base] == block_of[v] {
                    budgets[block_of[v]] += order as i64;
                }
            }
        }
        if budgets.iter().any(|&b| b < 0) {
            continue;
        }
        let choices: Vec<Vec<GenChoice>> = mono
            .factors()
            .iter()
            .enumerate()
            .map(|(v, fac)| general_choices(v, fac, &block_of, &local, &budgets))
            .collect();
        let mut picked = Vec::with_capacity(n);
        walk_blocks(&choices, &mut budgets, &mut picked, &mut |picked| {
            let mut outer = RawTerm::one(k);
            let mut inner: Vec<RawTerm> = blocks.iter().map(|&s| RawTerm::one(s)).collect();
            let mut coeff = c.clone();
            for ch in picked {
                apply_bit(&mut outer, &ch.outer);
                for (b, bit) in &ch.inner {
                    apply_bit(&mut inner[*b], bit);
                }
                coeff *= &ch.coeff;
            }
            let outer = canon(outer);
            let inner: Vec<LocalFn> = inner.into_iter().map(&mut canon).collect();
            out.add_product(&outer, &inner, &coeff);
        });
    }
    Ok(out)
}

fn apply_bit(t: &mut RawTerm, bit: &BlockBit) {
    match *bit {
        BlockBit::Pure(v, e) => t.pure[v] += e,
        BlockBit::Pole(hi, lo, k) => t.add_pole(hi, lo, k),
    }
}

fn general_choices(
    v: usize,
    fac: &Factor,
    block_of: &[usize],
    local: &[usize],
    budgets: &[i64],
) -> Vec<GenChoice> {
    let b = block_of[v];
    let j = local[v];
    let cap = |blk: usize| budgets[blk].max(0) as u32;
    match *fac {
        Factor::Pure(l) => (0..=l.min(cap(b)))
            .map(|a| GenChoice {
                outer: BlockBit::Pure(b, l - a),
                inner: vec![(b, BlockBit::Pure(j, a))],
                used: vec![(b, a)],
                coeff: binom(l as i64, a as i64),
            })
            .collect(),
        Factor::Diff { base, order } if block_of[base] == b => vec![GenChoice {
            outer: BlockBit::Pure(b, 0),
            inner: vec![(b, BlockBit::Pole(j, local[base], order))],
            used: vec![],
            coeff: Q::one(),
        }],
        // (Z_b - Z_b' + t_bj - t_b'j')^{-k}, expanded in the t's
        Factor::Diff { base, order } => {
            let bb = block_of[base];
            let jj = local[base];
            let mut out = Vec::new();
            for a in 0..=cap(b) {
                for rest in 0..=cap(bb) {
                    let r = a + rest;
                    out.push(GenChoice {
                        outer: BlockBit::Pole(b, bb, order + r),
                        inner: vec![(b, BlockBit::Pure(j, a)), (bb, BlockBit::Pure(jj, rest))],
                        used: vec![(b, a), (bb, rest)],
                        coeff: binom(-(order as i64), r as i64)
                            * binom(r as i64, a as i64)
                            * sign(rest as i64),
                    });
                }
            }
            out
        }
    }
}

fn walk_blocks<'a>(
    choices: &'a [Vec<GenChoice>],
    budgets: &mut Vec<i64>,
    picked: &mut Vec<&'a GenChoice>,
    emit: &mut dyn FnMut(&[&GenChoice]),
) {
    let Some((first, rest)) = choices.split_first() else {
        if budgets.iter().all(|&b| b == 0) {
            emit(picked);
        }
        return;
    };
    for ch in first {
        if ch.used.iter().any(|&(b, u)| budgets[b] < u as i64) {
            continue;
        }
        for &(b, u) in &ch.used {
            budgets[b] -= u as i64;
        }
        picked.push(ch);
        walk_blocks(rest, budgets, picked, emit);
        picked.pop();
        for &(b, u) in &ch.used {
            budgets[b] += u as i64;
        }
    }
}
