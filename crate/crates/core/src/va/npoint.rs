use num_traits::Zero;

use super::{Engine, Gen, Presentation, VaError};
use crate::linalg::{rank, solve};
use crate::localfn::{basis_monomials, Factor, LocalFn, LocalMonomial};
use crate::rational::binom;
use crate::Q;

/// Coefficient of `prod z_i^{e_i}` in the expansion of `m` where
/// `|z_n| > .. > |z_1|`. Each exponent vector picks out a single term.
fn expansion_coefficient(m: &LocalMonomial, e: &[i64]) -> Q {
    let n = e.len();
    let mut from_above = vec![0i64; n];
    let mut coeff = Q::from_integer(1.into());
    for v in (0..n).rev() {
        match m.factors()[v] {
            Factor::Pure(l) => {
                if e[v] != l as i64 + from_above[v] {
                    return Q::zero();
                }
            }
            Factor::Diff { base, order } => {
                // (z_v - z_b)^{-k} = sum_s binom(k+s-1, s) z_b^s z_v^{-k-s}
                let k = order as i64;
                let s = from_above[v] - k - e[v];
                if s < 0 {
                    return Q::zero();
                }
                coeff *= binom(k + s - 1, s);
                from_above[base] += s;
            }
        }
    }
    coeff
}

/// Exponent vectors with `e_1` in `[0, hi]`, `e_2..e_{r-1}` in `[lo, hi]`
/// and total `total`. Both sides vanish when `e_1 < 0`.
fn window(r: usize, lo: i64, hi: i64, total: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for i in 0..r - 1 {
        let lo = if i == 0 { 0 } else { lo };
        out = out
            .into_iter()
            .flat_map(|v| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    for v in &mut out {
        let s: i64 = v.iter().sum();
        v.push(total - s);
    }
    out
}

/// The local function whose expansion reproduces the vacuum coefficient of
/// `g_r(z_r) .. g_1(z_1) 1`.
pub fn npoint_vacuum(p: &Presentation, gens: &[Gen], pole_bound: u32) -> Result<LocalFn, VaError> {
    let r = gens.len();
    if r == 0 || r > 4 {
        return Err(VaError::Schema(format!("npoint needs 1 to 4 generators, got {r}")));
    }
    let grading: i64 = gens.iter().map(|&g| p.weight(g)).sum();
    let unknowns = basis_monomials(r, grading, pole_bound);
    let mut engine = Engine::new(p);
    let mut data = |e: &[i64]| -> Result<Q, VaError> {
        if e[0] < 0 {
            return Ok(Q::zero());
        }
        let modes: Vec<(Gen, i64)> = (0..r).rev().map(|i| (gens[i], -e[i] - 1)).collect();
        engine.reset_steps();
        engine.vacuum_pairing(&modes, &super::VAElement::vacuum())
    };
    let system = |pts: &[Vec<i64>], data: &mut dyn FnMut(&[i64]) -> Result<Q, VaError>| {
        let mut rows = Vec::with_capacity(pts.len());
        let mut rhs = Vec::with_capacity(pts.len());
        for e in pts {
            rows.push(unknowns.iter().map(|m| expansion_coefficient(m, e)).collect::<Vec<Q>>());
            rhs.push(data(e)?);
        }
        Ok::<_, VaError>((rows, rhs))
    };
    let reach = pole_bound as i64 + grading + 2;
    for hi in 0..=reach {
        let pts = window(r, -hi, hi, -grading);
        let (rows, rhs) = system(&pts, &mut data)?;
        let Some(x) = solve(&rows, &rhs, unknowns.len()) else {
            return Err(VaError::NoLocalMatch(format!(
                "series coefficients within |e| <= {hi} are inconsistent with pole bound {pole_bound}"
            )));
        };
        if rank(&rows, unknowns.len()) < unknowns.len() {
            continue;
        }
        let check = window(r, -hi - 2, hi + 2, -grading);
        let (rows, rhs) = system(&check, &mut data)?;
        for (row, b) in rows.iter().zip(&rhs) {
            let lhs: Q = row.iter().zip(&x).map(|(a, c)| a * c).sum();
            if &lhs != b {
                return Err(VaError::NoLocalMatch(
                    "fitted function disagrees with further series terms".into(),
                ));
            }
        }
        return Ok(LocalFn::from_terms(r, unknowns.into_iter().zip(x)));
    }
    Err(VaError::NoLocalMatch(format!(
        "series does not determine a local function with pole bound {pole_bound}"
    )))
}
