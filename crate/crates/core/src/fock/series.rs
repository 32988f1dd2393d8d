use std::collections::BTreeMap;

use super::{alpha_act, key_weight, lattice_vertex_act, FockError, FockKey, FockState};
use crate::linalg::rref;
use crate::Q;
use num_traits::Zero;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    Partitions,
    PartitionsMinPart2,
    /// `sum_m q^{norm m^2 / 2} / prod_k (1 - q^k)`
    ThetaOverEta(i64),
}

pub fn series_dims(kind: SeriesKind, w_max: usize) -> Vec<u64> {
    match kind {
        SeriesKind::Partitions => (0..=w_max).map(|w| count_partitions(w, w, 1)).collect(),
        SeriesKind::PartitionsMinPart2 => (0..=w_max).map(|w| count_partitions(w, w, 2)).collect(),
        SeriesKind::ThetaOverEta(norm) => {
            let mut theta = vec![0u64; w_max + 1];
            let mut m = 0i64;
            while norm * m * m / 2 <= w_max as i64 {
                let e = (norm * m * m / 2) as usize;
                theta[e] += if m == 0 { 1 } else { 2 };
                m += 1;
            }
            // multiply by 1/(1 - q^k) one factor at a time
            for k in 1..=w_max {
                for i in k..=w_max {
                    theta[i] += theta[i - k];
                }
            }
            theta
        }
    }
}

// partitions of `n` into parts in `[min, max]`, by explicit enumeration
fn count_partitions(n: usize, max: usize, min: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    (min..=max.min(n)).map(|p| count_partitions(n - p, p, min)).sum()
}

/// Dimensions of the span of everything reachable from the vacuum under
/// the modes of `lambda(-1)1`, `e^{lambda}` and `e^{-lambda}`, by weight.
pub fn realization_dims(norm: i64, w_max: i64) -> Result<Vec<usize>, FockError> {
    let mut spans: Vec<Vec<FockState>> = vec![Vec::new(); (w_max + 1) as usize];
    spans[0].push(FockState::vacuum());
    let mut frontier = vec![FockState::vacuum()];
    while let Some(s) = frontier.pop() {
        let wt = s.max_weight(norm).unwrap_or(0);
        for n in (wt - w_max)..=wt {
            let images = [
                alpha_act(norm, n, &s),
                lattice_vertex_act(norm, 1, n, &s, w_max)?,
                lattice_vertex_act(norm, -1, n, &s, w_max)?,
            ];
            for img in images {
                if img.is_zero() {
                    continue;
                }
                let w = img.max_weight(norm).unwrap();
                let slot = &mut spans[w as usize];
                if extends(slot, &img, norm) {
                    slot.push(img.clone());
                    frontier.push(img);
                }
            }
        }
    }
    Ok(spans.iter().map(|s| s.len()).collect())
}

fn extends(span: &[FockState], v: &FockState, norm: i64) -> bool {
    let mut keys: BTreeMap<FockKey, usize> = BTreeMap::new();
    for s in span.iter().chain([v]) {
        for (k, _) in s.terms() {
            debug_assert_eq!(key_weight(k, norm), key_weight(v.terms().next().unwrap().0, norm));
            let len = keys.len();
            keys.entry(k.clone()).or_insert(len);
        }
    }
    let row = |s: &FockState| {
        let mut r = vec![Q::zero(); keys.len()];
        for (k, c) in s.terms() {
            r[keys[k]] = c.clone();
        }
        r
    };
    let mut rows: Vec<Vec<Q>> = span.iter().map(row).collect();
    let before = rref(&mut rows.clone(), keys.len()).len();
    rows.push(row(v));
    rref(&mut rows, keys.len()).len() > before
}
