use std::collections::HashMap;

use num_traits::Zero;

use super::{Gen, Presentation, VAElement, VAWord, VaError};
use crate::rational::{binom, q, sign};
use crate::Q;

pub const DEFAULT_STEP_BOUND: u64 = 1_000_000;

/// Straightening engine with per-instance memo tables.
///
/// Only the declared relations `a(j)b` with `a <= b` are consulted; a
/// generator pair in the other order is commuted with the sign-flipped
/// commutator formula.
pub struct Engine<'p> {
    p: &'p Presentation,
    act_memo: HashMap<(Gen, i64, VAWord), VAElement>,
    comp_memo: HashMap<(VAWord, i64, VAWord), VAElement>,
    steps: u64,
    bound: u64,
}

impl<'p> Engine<'p> {
    pub fn new(p: &'p Presentation) -> Self {
        Self::with_bound(p, DEFAULT_STEP_BOUND)
    }

    pub fn with_bound(p: &'p Presentation, bound: u64) -> Self {
        Engine {
            p,
            act_memo: HashMap::new(),
            comp_memo: HashMap::new(),
            steps: 0,
            bound,
        }
    }

    pub fn presentation(&self) -> &'p Presentation {
        self.p
    }

    fn tick(&mut self) -> Result<(), VaError> {
        self.steps += 1;
        if self.steps > self.bound {
            return Err(VaError::NonTerminating { steps: self.bound });
        }
        Ok(())
    }

    /// Resets the step counter; each public query starts a fresh budget.
    pub fn reset_steps(&mut self) {
        self.steps = 0;
    }

    /// `a(n) w` in normal form, for a normal word `w`.
    pub fn act(&mut self, a: Gen, n: i64, w: &VAWord) -> Result<VAElement, VaError> {
        let p = self.p;
        if p.weight(a) - n - 1 + w.weight(p) < 0 {
            return Ok(VAElement::zero());
        }
        let Some(&(b, k)) = w.modes.first() else {
            return Ok(if n >= 0 {
                VAElement::zero()
            } else {
                VAElement::word(VAWord::new(vec![(a, n)]))
            });
        };
        if n < 0 && (n > k || (n == k && a >= b)) {
            let mut modes = Vec::with_capacity(w.len() + 1);
            modes.push((a, n));
            modes.extend_from_slice(&w.modes);
            return Ok(VAElement::word(VAWord::new(modes)));
        }
        let key = (a, n, w.clone());
        if let Some(hit) = self.act_memo.get(&key) {
            return Ok(hit.clone());
        }
        self.tick()?;
        let rest = w.tail();
        let mut out = VAElement::zero();
        // b(k) a(n) rest
        let moved = self.act(a, n, &rest)?;
        for (u, c) in moved.terms() {
            out.add_scaled(&self.act(b, k, u)?, c);
        }
        // [a(n), b(k)] rest
        let comm = self.commutator_terms(a, n, b, k);
        for (coeff, entry, mode) in comm {
            for (e, c) in entry.terms() {
                let piece = self.composite(e, mode, &rest)?;
                out.add_scaled(&piece, &(&coeff * c));
            }
        }
        self.act_memo.insert(key, out.clone());
        Ok(out)
    }

    /// `[a(n), b(k)] = sum_j coeff_j (entry_j)(mode_j)`.
    fn commutator_terms(&self, a: Gen, n: i64, b: Gen, k: i64) -> Vec<(Q, VAElement, i64)> {
        if a <= b {
            self.p
                .declared_between(a, b)
                .map(|(j, e)| (binom(n, j), e.clone(), n + k - j))
                .collect()
        } else {
            self.p
                .declared_between(b, a)
                .map(|(j, e)| (-binom(k, j), e.clone(), k + n - j))
                .collect()
        }
    }

    /// The mode `c(m)` of a normal word `c`, applied to a normal word `w`.
    pub fn composite(&mut self, c: &VAWord, m: i64, w: &VAWord) -> Result<VAElement, VaError> {
        let p = self.p;
        let Some(&(b, q)) = c.modes.first() else {
            return Ok(if m == -1 {
                VAElement::word(w.clone())
            } else {
                VAElement::zero()
            });
        };
        let wt_w = w.weight(p);
        if c.weight(p) - m - 1 + wt_w < 0 {
            return Ok(VAElement::zero());
        }
        if c.len() == 1 && q == -1 {
            return self.act(b, m, w);
        }
        let key = (c.clone(), m, w.clone());
        if let Some(hit) = self.comp_memo.get(&key) {
            return Ok(hit.clone());
        }
        self.tick()?;
        let rest = c.tail();
        let wt_rest = rest.weight(p);
        let mut out = VAElement::zero();
        // (b(q) rest)(m) = sum_j (-1)^j binom(q, j)
        //   [ b(q - j) rest(m + j) - (-1)^q rest(q + m - j) b(j) ]
        let j_max = wt_rest + wt_w - m - 1;
        for j in 0..=j_max.max(-1) {
            let coeff = sign(j) * binom(q, j);
            let inner = self.composite(&rest, m + j, w)?;
            for (u, cu) in inner.terms() {
                out.add_scaled(&self.act(b, q - j, u)?, &(&coeff * cu));
            }
        }
        let j_max = p.weight(b) + wt_w - 1;
        for j in 0..=j_max.max(-1) {
            let coeff = -(sign(j) * binom(q, j) * sign(q));
            let inner = self.act(b, j, w)?;
            for (u, cu) in inner.terms() {
                out.add_scaled(&self.composite(&rest, q + m - j, u)?, &(&coeff * cu));
            }
        }
        self.comp_memo.insert(key, out.clone());
        Ok(out)
    }

    /// Applies an arbitrary sequence of modes to the vacuum, innermost last
    /// in the list.
    pub fn eval_modes(&mut self, modes: &[(Gen, i64)]) -> Result<VAElement, VaError> {
        let mut cur = VAElement::vacuum();
        for &(g, n) in modes.iter().rev() {
            cur = self.act_element(g, n, &cur)?;
        }
        Ok(cur)
    }

    pub fn act_element(&mut self, g: Gen, n: i64, x: &VAElement) -> Result<VAElement, VaError> {
        let mut out = VAElement::zero();
        for (w, c) in x.terms() {
            out.add_scaled(&self.act(g, n, w)?, c);
        }
        Ok(out)
    }

    /// `x(n) y`.
    pub fn bracket(&mut self, x: &VAElement, y: &VAElement, n: i64) -> Result<VAElement, VaError> {
        self.reset_steps();
        let mut out = VAElement::zero();
        for (c, a) in x.terms() {
            for (w, b) in y.terms() {
                out.add_scaled(&self.composite(c, n, w)?, &(a * b));
            }
        }
        Ok(out)
    }

    /// `L_{-1} x`, from `(L_{-1} a)(n) = -n a(n-1)` and `L_{-1} 1 = 0`.
    pub fn derivative(&mut self, x: &VAElement) -> Result<VAElement, VaError> {
        self.reset_steps();
        let mut out = VAElement::zero();
        for (w, c) in x.terms() {
            for i in 0..w.len() {
                let n = w.modes[i].1;
                if n == 0 {
                    continue;
                }
                let mut modes = w.modes.clone();
                modes[i].1 = n - 1;
                let piece = self.eval_modes(&modes)?;
                out.add_scaled(&piece, &(c * q(-n)));
            }
        }
        Ok(out)
    }

    pub fn derivative_power(&mut self, x: &VAElement, j: u32) -> Result<VAElement, VaError> {
        let mut cur = x.clone();
        for _ in 0..j {
            if cur.is_zero() {
                break;
            }
            cur = self.derivative(&cur)?;
        }
        Ok(cur)
    }

    /// Normal form of an arbitrary word.
    pub fn normal_form(&mut self, w: &VAWord) -> Result<VAElement, VaError> {
        self.reset_steps();
        self.eval_modes(&w.modes)
    }

    /// Vacuum coefficient of `modes` applied to `x`.
    pub fn vacuum_pairing(&mut self, modes: &[(Gen, i64)], x: &VAElement) -> Result<Q, VaError> {
        let mut cur = x.clone();
        for &(g, n) in modes.iter().rev() {
            cur = self.act_element(g, n, &cur)?;
            if cur.is_zero() {
                return Ok(Q::zero());
            }
        }
        Ok(cur.vacuum_coefficient())
    }
}
