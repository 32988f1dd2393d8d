//! Randomized check of the co-operad axioms, one graded component at a time.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{cocompose_general, CooperadError, TensorElement};
use crate::localfn::{basis_monomials, LocalFn, Permutation};
use crate::rational::fmt_rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub max_arity: usize,
    pub samples: usize,
    /// Components are checked for every inner grading in `-order..=order`.
    pub order: i64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_arity: 4,
            samples: 50,
            order: 4,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub kind: String,
    pub input: String,
    /// One-based variable sets involved in the check.
    pub slots: Vec<Vec<usize>>,
    pub component: Vec<i64>,
    pub status: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Only components where some side is nonzero are listed.
    pub checks: Vec<CheckRecord>,
    pub failures: usize,
    pub zero_components: usize,
}

impl VerifyReport {
    fn record(
        &mut self,
        kind: &str,
        f: &LocalFn,
        slots: &[&[usize]],
        component: Vec<i64>,
        lhs: &TensorElement,
        rhs: &TensorElement,
    ) {
        if lhs.is_zero() && rhs.is_zero() {
            self.zero_components += 1;
            return;
        }
        let (status, l, r) = match lhs.first_difference(rhs) {
            None => (
                "pass",
                format!("{} terms", lhs.len()),
                format!("{} terms", rhs.len()),
            ),
            Some((key, a, b)) => {
                self.failures += 1;
                (
                    "fail",
                    format!("{} * {key}", fmt_rational(&a)),
                    format!("{} * {key}", fmt_rational(&b)),
                )
            }
        };
        self.checks.push(CheckRecord {
            kind: kind.into(),
            input: f.to_string(),
            slots: slots
                .iter()
                .map(|s| s.iter().map(|v| v + 1).collect())
                .collect(),
            component,
            status: status.into(),
            lhs: l,
            rhs: r,
        });
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn grading(f: &LocalFn) -> Result<i64, CooperadError> {
    f.homogeneous_grading()
        .ok_or(CooperadError::NotHomogeneous)
}

fn position(list: &[usize], v: usize) -> usize {
    list.iter().position(|&x| x == v).expect("member")
}

fn complement(n: usize, subset: &[usize]) -> Vec<usize> {
    (0..n).filter(|v| !subset.contains(v)).collect()
}

/// Inserting `subset` into `f sigma` against inserting its preimage into `f`
/// and relabeling both factors.
pub fn check_equivariance(
    report: &mut VerifyReport,
    f: &LocalFn,
    sigma: &Permutation,
    subset: &[usize],
    order: i64,
) -> Result<(), CooperadError> {
    let n = f.arity();
    let g = grading(f)?;
    let moved = f.permute(sigma)?;
    let mut pre: Vec<usize> = (0..n)
        .filter(|&m| subset.contains(&sigma.apply(m)))
        .collect();
    pre.sort_unstable();
    let rest_c = complement(n, subset);
    let rest_d = complement(n, &pre);
    let mut outer_target: Vec<usize> = rest_d
        .iter()
        .map(|&m| position(&rest_c, sigma.apply(m)))
        .collect();
    outer_target.push(rest_c.len());
    let inner_target: Vec<usize> = pre
        .iter()
        .map(|&m| position(subset, sigma.apply(m)))
        .collect();
    for q in -order..=order {
        let lhs = super::insert_at(&moved, subset, g - q)?;
        let rhs = super::insert_at(f, &pre, g - q)?
            .relabel(0, &outer_target)
            .relabel(1, &inner_target);
        report.record("equivariance", f, &[subset], vec![g - q, q], &lhs, &rhs);
    }
    Ok(())
}

/// Inserting two disjoint sets in either order.
pub fn check_commutativity(
    report: &mut VerifyReport,
    f: &LocalFn,
    first: &[usize],
    second: &[usize],
    order: i64,
) -> Result<(), CooperadError> {
    let n = f.arity();
    let g = grading(f)?;
    let base = TensorElement::from_fn(f);
    let after_first = complement(n, first);
    let after_second = complement(n, second);
    let second_pos: Vec<usize> = second.iter().map(|&v| position(&after_first, v)).collect();
    let first_pos: Vec<usize> = first.iter().map(|&v| position(&after_second, v)).collect();
    let r = n - first.len() - second.len();
    let mut swap: Vec<usize> = (0..r).collect();
    swap.extend([r + 1, r]);
    for q1 in -order..=order {
        let a1 = base.insert_outer(first, g - q1)?;
        for q2 in -order..=order {
            let lhs = a1.insert_outer(&second_pos, g - q1 - q2)?;
            let rhs = base
                .insert_outer(second, g - q2)?
                .insert_outer(&first_pos, g - q1 - q2)?
                .relabel(0, &swap)
                .reorder_inners(&[1, 0]);
            report.record(
                "commutativity",
                f,
                &[first, second],
                vec![g - q1 - q2, q1, q2],
                &lhs,
                &rhs,
            );
        }
    }
    Ok(())
}

/// Inserting `outer_set` and then `inner_set` (a subset of it) into the new
/// inner factor, against inserting `inner_set` first and then the rest of
/// `outer_set` together with the new point.
pub fn check_coassociativity(
    report: &mut VerifyReport,
    f: &LocalFn,
    outer_set: &[usize],
    inner_set: &[usize],
    order: i64,
) -> Result<(), CooperadError> {
    let n = f.arity();
    let g = grading(f)?;
    let base = TensorElement::from_fn(f);
    let within: Vec<usize> = inner_set.iter().map(|&v| position(outer_set, v)).collect();
    let after_inner = complement(n, inner_set);
    let mut second: Vec<usize> = outer_set
        .iter()
        .filter(|v| !inner_set.contains(v))
        .map(|&v| position(&after_inner, v))
        .collect();
    second.push(after_inner.len());
    for l0 in -order..=order {
        let first = base.insert_outer(outer_set, l0)?;
        for lb in -order..=order {
            let la = g - l0 - lb;
            let lhs = first.insert_inner(0, &within, la)?;
            let rhs = base
                .insert_outer(inner_set, g - lb)?
                .insert_outer(&second, l0)?
                .reorder_inners(&[1, 0]);
            report.record(
                "coassociativity",
                f,
                &[outer_set, inner_set],
                vec![l0, la, lb],
                &lhs,
                &rhs,
            );
        }
    }
    Ok(())
}

/// The one-step co-composition along consecutive blocks against inserting
/// the blocks one at a time.
pub fn check_cocomposition(
    report: &mut VerifyReport,
    f: &LocalFn,
    blocks: &[usize],
    order: i64,
) -> Result<(), CooperadError> {
    let g = grading(f)?;
    let k = blocks.len();
    let starts: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, &b| {
            let s = *acc;
            *acc += b;
            Some(s)
        })
        .collect();
    let slots: Vec<Vec<usize>> = (0..k)
        .map(|b| (starts[b]..starts[b] + blocks[b]).collect())
        .collect();
    let slot_refs: Vec<&[usize]> = slots.iter().map(Vec::as_slice).collect();
    let reverse: Vec<usize> = (0..k).rev().collect();
    let mut inner = vec![-order; k];
    loop {
        let mut md = vec![g - inner.iter().sum::<i64>()];
        md.extend_from_slice(&inner);
        let lhs = cocompose_general(f, blocks, &md)?;
        let mut t = TensorElement::from_fn(f);
        let mut current = g;
        for b in (0..k).rev() {
            current -= inner[b];
            t = t.insert_outer(&slots[b], current)?;
        }
        let rhs = t.relabel(0, &reverse).reorder_inners(&reverse);
        report.record("cocomposition", f, &slot_refs, md, &lhs, &rhs);

        // next multidegree in the box
        let mut i = 0;
        while i < k && inner[i] == order {
            inner[i] = -order;
            i += 1;
        }
        if i == k {
            break;
        }
        inner[i] += 1;
    }
    Ok(())
}

/// A random basis monomial of arity at most `max_arity`.
pub fn random_monomial<R: Rng>(rng: &mut R, max_arity: usize) -> LocalFn {
    loop {
        let n = rng.gen_range(1..=max_arity);
        let budget = rng.gen_range(0..=3u32);
        let g = rng.gen_range(-2..=budget as i64);
        let basis = basis_monomials(n, g, budget);
        if let Some(m) = basis.choose(rng) {
            return LocalFn::monomial(m.clone());
        }
    }
}

fn random_subset<R: Rng>(rng: &mut R, pool: &[usize], size: usize) -> Vec<usize> {
    let mut s: Vec<usize> = pool.choose_multiple(rng, size).copied().collect();
    s.sort_unstable();
    s
}

/// Random homogeneous basis monomials, each put through all four checks.
pub fn verify_axioms(config: &VerifyConfig) -> Result<VerifyReport, CooperadError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = VerifyReport::default();
    let order = config.order;
    for _ in 0..config.samples {
        let f = random_monomial(&mut rng, config.max_arity.max(1));
        let n = f.arity();
        let all: Vec<usize> = (0..n).collect();

        let mut images = all.clone();
        images.shuffle(&mut rng);
        let sigma = Permutation::new(images)?;
        let size = rng.gen_range(1..=n);
        let subset = random_subset(&mut rng, &all, size);
        check_equivariance(&mut report, &f, &sigma, &subset, order)?;

        if n >= 2 {
            let s1 = rng.gen_range(1..n);
            let first = random_subset(&mut rng, &all, s1);
            let rest = complement(n, &first);
            let s2 = rng.gen_range(1..=rest.len());
            let second = random_subset(&mut rng, &rest, s2);
            check_commutativity(&mut report, &f, &first, &second, order)?;

            let outer_size = rng.gen_range(2..=n);
            let outer_set = random_subset(&mut rng, &all, outer_size);
            let inner_size = rng.gen_range(1..=outer_size);
            let inner_set = random_subset(&mut rng, &outer_set, inner_size);
            check_coassociativity(&mut report, &f, &outer_set, &inner_set, order)?;
        }

        // at most three consecutive blocks keeps the multidegree box small
        let k = rng.gen_range(1..=n.min(3));
        let mut cuts = random_subset(&mut rng, &(1..n).collect::<Vec<_>>(), k - 1);
        cuts.push(n);
        let blocks: Vec<usize> = cuts
            .iter()
            .scan(0, |prev, &c| {
                let b = c - *prev;
                *prev = c;
                Some(b)
            })
            .collect();
        check_cocomposition(&mut report, &f, &blocks, order)?;
    }
    Ok(report)
}
