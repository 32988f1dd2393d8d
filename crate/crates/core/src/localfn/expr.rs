//! Text front end: `expr := ['-'] term (('+'|'-') term)*`,
//! `term := factor ('*' factor)*`, `factor := atom ['^' int]`,
//! `atom := 'z'int | rational | '(' expr ')'`.
//!
//! A negative exponent is accepted only on a parenthesized `z_i - z_j`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::canon::{add_raw_into, canonicalize_terms, mul_raw, RawTerm};
use super::{LocalFn, LocalFnError};
use crate::rational::parse_rational;
use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Var(usize),
    Const(Q),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Pow(Box<Node>, i64),
}

/// A parsed expression together with its declared arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawExpr {
    pub arity: usize,
    pub root: Node,
}

pub fn parse(text: &str, arity: usize) -> Result<RawExpr, LocalFnError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        arity,
    };
    let root = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(RawExpr { arity, root })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    arity: usize,
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> LocalFnError {
        LocalFnError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn expr(&mut self) -> Result<Node, LocalFnError> {
        let mut acc = if self.eat(b'-') {
            Node::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = Node::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Node::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Node, LocalFnError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = Node::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Node, LocalFnError> {
        let base_pos = self.pos;
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let neg = self.eat(b'-');
        self.skip_ws();
        let digits = self.digits();
        let k: i64 = digits
            .ok_or_else(|| self.syntax("expected integer exponent"))?
            .parse()
            .map_err(|_| self.syntax("exponent out of range"))?;
        let k = if neg { -k } else { k };
        if k < 0 && !is_difference_atom(&base) {
            return Err(LocalFnError::IllegalPole { pos: base_pos });
        }
        Ok(Node::Pow(Box::new(base), k))
    }

    fn atom(&mut self) -> Result<Node, LocalFnError> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                let idx_pos = self.pos;
                let digits = self.digits();
                let index: usize = digits
                    .ok_or_else(|| self.syntax("expected variable index"))?
                    .parse()
                    .map_err(|_| LocalFnError::Syntax {
                        pos: idx_pos,
                        msg: "variable index out of range".into(),
                    })?;
                if index == 0 || index > self.arity {
                    return Err(LocalFnError::BadIndex {
                        index,
                        arity: self.arity,
                    });
                }
                Ok(Node::Var(index - 1))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                self.digits();
                if self.src.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    if self.digits().is_none() {
                        return Err(self.syntax("expected denominator"));
                    }
                }
                let lit = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                parse_rational(lit)
                    .map(Node::Const)
                    .map_err(|_| LocalFnError::Syntax {
                        pos: start,
                        msg: "invalid rational literal".into(),
                    })
            }
            _ => Err(self.syntax("expected variable, number or '('")),
        }
    }
}

fn difference_vars(n: &Node) -> Option<(usize, usize)> {
    match n {
        Node::Sub(a, b) => match (a.as_ref(), b.as_ref()) {
            (Node::Var(i), Node::Var(j)) if i != j => Some((*i, *j)),
            _ => None,
        },
        _ => None,
    }
}

fn is_difference_atom(n: &Node) -> bool {
    difference_vars(n).is_some()
}

type RawPoly = BTreeMap<RawTerm, Q>;

fn constant(arity: usize, c: Q) -> RawPoly {
    let mut p = RawPoly::new();
    if !c.is_zero() {
        p.insert(RawTerm::one(arity), c);
    }
    p
}

fn expand(n: &Node, arity: usize) -> RawPoly {
    match n {
        Node::Var(i) => {
            let mut p = RawPoly::new();
            p.insert(RawTerm::var(arity, *i), Q::one());
            p
        }
        Node::Const(c) => constant(arity, c.clone()),
        Node::Neg(a) => {
            let mut out = RawPoly::new();
            add_raw_into(&mut out, &expand(a, arity), &-Q::one());
            out
        }
        Node::Add(a, b) | Node::Sub(a, b) => {
            let s = if matches!(n, Node::Add(..)) {
                Q::one()
            } else {
                -Q::one()
            };
            let mut out = expand(a, arity);
            add_raw_into(&mut out, &expand(b, arity), &s);
            out
        }
        Node::Mul(a, b) => mul_raw(&expand(a, arity), &expand(b, arity)),
        Node::Pow(base, k) if *k < 0 => {
            let (i, j) = difference_vars(base).expect("checked at parse time");
            let (t, s) = RawTerm::inverse_difference(arity, i, j, (-k) as u32);
            let mut p = RawPoly::new();
            p.insert(t, s);
            p
        }
        Node::Pow(base, k) => {
            let b = expand(base, arity);
            let mut acc = constant(arity, Q::one());
            for _ in 0..*k {
                acc = mul_raw(&acc, &b);
            }
            acc
        }
    }
}

fn eval_node(n: &Node, points: &[Q]) -> Option<Q> {
    Some(match n {
        Node::Var(i) => points[*i].clone(),
        Node::Const(c) => c.clone(),
        Node::Neg(a) => -eval_node(a, points)?,
        Node::Add(a, b) => eval_node(a, points)? + eval_node(b, points)?,
        Node::Sub(a, b) => eval_node(a, points)? - eval_node(b, points)?,
        Node::Mul(a, b) => eval_node(a, points)? * eval_node(b, points)?,
        Node::Pow(a, k) => {
            let x = eval_node(a, points)?;
            if *k < 0 && x.is_zero() {
                return None;
            }
            num_traits::Pow::pow(x, *k as i32)
        }
    })
}

impl RawExpr {
    /// The unique basis expansion of the expression.
    pub fn canonicalize(&self) -> LocalFn {
        canonicalize_terms(self.arity, expand(&self.root, self.arity))
    }

    /// Direct evaluation of the tree, independent of canonicalization.
    pub fn evaluate(&self, points: &[Q]) -> Result<Q, LocalFnError> {
        if points.len() != self.arity {
            return Err(LocalFnError::PointCount {
                expected: self.arity,
                got: points.len(),
            });
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(LocalFnError::CoincidentPoints(i + 1, j + 1));
                }
            }
        }
        Ok(eval_node(&self.root, points).expect("distinct points never hit a pole"))
    }
}
