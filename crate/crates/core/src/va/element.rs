use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::{Engine, Gen, Presentation, VaError};
use crate::rational::{fmt_rational, parse_rational};
use crate::Q;

/// `b_1(n_1) .. b_k(n_k) 1`; `modes[0]` is the outermost mode.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VAWord {
    pub modes: Vec<(Gen, i64)>,
}

impl VAWord {
    pub fn vacuum() -> Self {
        VAWord { modes: vec![] }
    }

    pub fn new(modes: Vec<(Gen, i64)>) -> Self {
        VAWord { modes }
    }

    /// `g(-1)1`, the state of a generator.
    pub fn generator(g: Gen) -> Self {
        VAWord {
            modes: vec![(g, -1)],
        }
    }

    pub fn is_vacuum(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn weight(&self, p: &Presentation) -> i64 {
        self.modes
            .iter()
            .map(|&(g, n)| p.weight(g) - n - 1)
            .sum()
    }

    /// `0 > n_1 >= .. >= n_k`, equal modes with generators non-increasing.
    pub fn is_normal(&self) -> bool {
        self.modes.iter().all(|&(_, n)| n < 0)
            && self
                .modes
                .windows(2)
                .all(|w| w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 >= w[1].0))
    }

    pub(crate) fn tail(&self) -> VAWord {
        VAWord {
            modes: self.modes[1..].to_vec(),
        }
    }

    pub fn show(&self, p: &Presentation) -> String {
        let mut s: String = self
            .modes
            .iter()
            .map(|&(g, n)| format!("{}({})", p.generators[g].name, n))
            .collect();
        s.push('1');
        s
    }
}

/// A finite rational combination of words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VAElement {
    terms: BTreeMap<VAWord, Q>,
}

impl VAElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::word(VAWord::vacuum())
    }

    pub fn word(w: VAWord) -> Self {
        let mut e = Self::zero();
        e.terms.insert(w, Q::one());
        e
    }

    pub fn generator(g: Gen) -> Self {
        Self::word(VAWord::generator(g))
    }

    pub fn from_terms<I: IntoIterator<Item = (VAWord, Q)>>(it: I) -> Self {
        let mut e = Self::zero();
        for (w, c) in it {
            e.add_term(w, c);
        }
        e
    }

    pub fn add_term(&mut self, w: VAWord, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add_scaled(&mut self, other: &VAElement, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (w, a) in &other.terms {
            self.add_term(w.clone(), a * c);
        }
    }

    pub fn add(&self, other: &VAElement) -> VAElement {
        let mut out = self.clone();
        out.add_scaled(other, &Q::one());
        out
    }

    pub fn sub(&self, other: &VAElement) -> VAElement {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    pub fn scale(&self, c: &Q) -> VAElement {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VAWord, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &VAWord) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn vacuum_coefficient(&self) -> Q {
        self.coefficient(&VAWord::vacuum())
    }

    /// The common weight of all words, if there is one.
    pub fn weight(&self, p: &Presentation) -> Option<i64> {
        let mut it = self.terms.keys().map(|w| w.weight(p));
        let first = it.next()?;
        it.all(|x| x == first).then_some(first)
    }

    pub fn show(&self, p: &Presentation) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let body = w.show(p);
            let mag = c.abs();
            let text = if mag.is_one() {
                body
            } else {
                format!("{} * {}", fmt_rational(&mag), body)
            };
            match (i, c.is_negative()) {
                (0, false) => out.push_str(&text),
                (0, true) => out.push_str(&format!("-{text}")),
                (_, false) => out.push_str(&format!(" + {text}")),
                (_, true) => out.push_str(&format!(" - {text}")),
            }
        }
        out
    }
}

/// Parses `[c *] word (+|- [c *] word)*`, where a word is a sequence of
/// `name(mode)` ending in `1` or in a bare generator name (meaning
/// `name(-1)1`), and normalizes the result.
pub fn parse_element(p: &Presentation, text: &str) -> Result<VAElement, VaError> {
    let raw = parse_raw(p, text)?;
    let mut engine = Engine::new(p);
    let mut out = VAElement::zero();
    for (c, modes) in raw {
        out.add_scaled(&engine.eval_modes(&modes)?, &c);
    }
    Ok(out)
}

type RawWord = (Q, Vec<(Gen, i64)>);

fn parse_raw(p: &Presentation, text: &str) -> Result<Vec<RawWord>, VaError> {
    let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = |pos: usize, msg: &str| VaError::Syntax {
        pos,
        msg: msg.into(),
    };
    let mut pos = 0;
    let mut out = Vec::new();
    if s.is_empty() {
        return Err(err(0, "empty input"));
    }
    loop {
        let mut sign = Q::one();
        if pos < s.len() && (s[pos] == '+' || s[pos] == '-') {
            if s[pos] == '-' {
                sign = -sign;
            }
            pos += 1;
        } else if !out.is_empty() {
            return Err(err(pos, "expected '+' or '-'"));
        }
        // optional coefficient
        let start = pos;
        while pos < s.len() && (s[pos].is_ascii_digit() || s[pos] == '/') {
            pos += 1;
        }
        let mut coeff = Q::one();
        if pos < s.len() && s[pos] == '*' {
            let lit: String = s[start..pos].iter().collect();
            coeff = parse_rational(&lit).map_err(|_| err(start, "bad coefficient"))?;
            pos += 1;
        } else {
            pos = start;
        }
        let mut modes = Vec::new();
        loop {
            if pos < s.len() && s[pos] == '1' {
                pos += 1;
                break;
            }
            let name_start = pos;
            if pos < s.len() && (s[pos].is_alphabetic() || s[pos] == '_') {
                while pos < s.len() && (s[pos].is_alphanumeric() || s[pos] == '_') {
                    pos += 1;
                }
            }
            if pos == name_start {
                return Err(err(pos, "expected generator name or '1'"));
            }
            let name: String = s[name_start..pos].iter().collect();
            let g = p
                .generator_index(&name)
                .ok_or_else(|| VaError::UnknownGenerator(name.clone()))?;
            if pos < s.len() && s[pos] == '(' {
                pos += 1;
                let ms = pos;
                if pos < s.len() && s[pos] == '-' {
                    pos += 1;
                }
                while pos < s.len() && s[pos].is_ascii_digit() {
                    pos += 1;
                }
                let lit: String = s[ms..pos].iter().collect();
                let n: i64 = lit.parse().map_err(|_| err(ms, "bad mode"))?;
                if pos >= s.len() || s[pos] != ')' {
                    return Err(err(pos, "expected ')'"));
                }
                pos += 1;
                modes.push((g, n));
            } else {
                // a bare name ends the word
                modes.push((g, -1));
                break;
            }
        }
        out.push((sign * coeff, modes));
        if pos == s.len() {
            return Ok(out);
        }
    }
}
