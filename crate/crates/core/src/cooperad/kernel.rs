//! The two double expansions behind commutativity and coassociativity of
//! insertions.
//!
//! Symmetric: `((s-t) + X - Y)^{-1}` with `X = z_i - s`, `Y = z_j - t`; entry
//! `(m, n)` is the coefficient of `Y^m X^n (s-t)^{-m-n-1}`.
//!
//! Associative: `(-(z_i-s) + (z_j-s))^{-1}`, re-expanded through
//! `z_j - s = (t-s) + (z_j-t)`; entry `(m, n)` is the coefficient of
//! `(t-s)^m (z_j-t)^n (z_i-s)^{-m-n-1}`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::rational::{binom, sign};
use crate::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Symmetric,
    Associative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelTable {
    pub kind: KernelKind,
    pub coefficients: BTreeMap<(u32, u32), Q>,
}

/// Coefficient `(m, n)` computed by both expansion orders.
pub fn kernel_routes(kind: KernelKind, m: u32, n: u32) -> (Q, Q) {
    let (m, n) = (m as i64, n as i64);
    match kind {
        KernelKind::Symmetric => {
            // X first: binom(-1, n) X^n (D - Y)^{-1-n}, then expand in Y
            let x_first = binom(-1, n) * binom(-1 - n, m) * sign(m);
            // Y first: binom(-1, m) (-Y)^m (D + X)^{-1-m}, then expand in X
            let y_first = binom(-1, m) * sign(m) * binom(-1 - m, n);
            (x_first, y_first)
        }
        KernelKind::Associative => {
            // in (z_j - s) over -(z_i - s), then binomially in (t - s), (z_j - t)
            let a = m + n;
            let via_s = binom(-1, a) * sign(1 + a) * binom(a, n);
            // in (z_j - t) over -(z_i - t), then -(z_i - t) = -(z_i - s) + (t - s)
            let via_t = binom(-1, n) * binom(-1 - n, m) * sign(1 + n + m);
            (via_s, via_t)
        }
    }
}

pub fn kernel_closed_form(kind: KernelKind, m: u32, n: u32) -> Q {
    let (m, n) = (m as i64, n as i64);
    match kind {
        KernelKind::Symmetric => binom(m + n, n) * sign(n),
        KernelKind::Associative => -binom(m + n, m),
    }
}

/// Table of the first expansion order; see [`kernel_routes`] for the second.
pub fn kernel_table(kind: KernelKind, m_max: u32, n_max: u32) -> KernelTable {
    let mut coefficients = BTreeMap::new();
    for m in 0..=m_max {
        for n in 0..=n_max {
            coefficients.insert((m, n), kernel_routes(kind, m, n).0);
        }
    }
    KernelTable { kind, coefficients }
}
