use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Engine, Gen, VAElement, VAWord, VaError};
use crate::rational::{factorial, fmt_rational, frac, parse_rational, q, sign};
use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub weight: i64,
}

/// Rank-one even lattice `Z lambda` with `<lambda, lambda> = norm`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeData {
    pub norm: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<Generator>,
    pub central: BTreeMap<String, Q>,
    pub connectivity: i64,
    pub lattice: Option<LatticeData>,
    /// Declared `a(n)b` for `a <= b`, including entries declared zero.
    declared: BTreeMap<(Gen, Gen, i64), VAElement>,
    /// All `a(n)b`, the `a > b` half filled in by skew symmetry.
    ope: BTreeMap<(Gen, Gen, i64), VAElement>,
}

impl Presentation {
    pub fn weight(&self, g: Gen) -> i64 {
        self.generators[g].weight
    }

    pub fn generator_index(&self, name: &str) -> Option<Gen> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn name(&self, g: Gen) -> &str {
        &self.generators[g].name
    }

    pub(crate) fn declared_between(&self, a: Gen, b: Gen) -> impl Iterator<Item = (i64, &VAElement)> {
        self.declared
            .range((a, b, i64::MIN)..=(a, b, i64::MAX))
            .map(|((_, _, j), e)| (*j, e))
    }

    /// `a(n)b` for generators and `n >= 0`, from the completed table.
    pub fn relation_count(&self) -> usize {
        self.declared.len()
    }

    pub fn ope_entry(&self, a: Gen, b: Gen, n: i64) -> VAElement {
        self.ope.get(&(a, b, n)).cloned().unwrap_or_default()
    }

    pub(crate) fn ope_pairs(&self, a: Gen, b: Gen) -> Vec<(i64, VAElement)> {
        self.ope
            .range((a, b, i64::MIN)..=(a, b, i64::MAX))
            .filter(|(_, e)| !e.is_zero())
            .map(|((_, _, j), e)| (*j, e.clone()))
            .collect()
    }

    /// Builds a presentation from generators and the `a <= b` half of the
    /// OPE table, validating weights and completing the table.
    pub fn new(
        generators: Vec<Generator>,
        central: BTreeMap<String, Q>,
        relations: Vec<(Gen, Gen, i64, VAElement)>,
        lattice: Option<LatticeData>,
    ) -> Result<Presentation, VaError> {
        let mut names = BTreeSet::new();
        for g in &generators {
            if !names.insert(g.name.as_str()) {
                return Err(VaError::Schema(format!("duplicate generator `{}`", g.name)));
            }
            if g.name.is_empty() || !g.name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(VaError::Schema(format!("bad generator name `{}`", g.name)));
            }
            if g.name.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                return Err(VaError::Schema(format!("bad generator name `{}`", g.name)));
            }
            if g.weight < 1 {
                return Err(VaError::Schema(format!(
                    "generator `{}` has weight {}; weights must be at least 1",
                    g.name, g.weight
                )));
            }
        }
        let mut p = Presentation {
            generators,
            central,
            connectivity: 0,
            lattice,
            declared: BTreeMap::new(),
            ope: BTreeMap::new(),
        };
        for (a, b, n, e) in relations {
            let (na, nb) = (p.name(a).to_string(), p.name(b).to_string());
            if a > b {
                return Err(VaError::Schema(format!(
                    "relation [{na},{nb}]_{n}: declare pairs with the first generator not after the second"
                )));
            }
            if n < 0 {
                return Err(VaError::Schema(format!("relation [{na},{nb}]_{n}: n must be >= 0")));
            }
            if p.declared.contains_key(&(a, b, n)) {
                return Err(VaError::Schema(format!("relation [{na},{nb}]_{n} declared twice")));
            }
            let expected = p.weight(a) + p.weight(b) - n - 1;
            if expected < 0 {
                if e.is_zero() {
                    continue;
                }
                return Err(VaError::UnboundedOPE { a: na, b: nb, n });
            }
            for (w, _) in e.terms() {
                if !w.is_normal() {
                    return Err(VaError::Schema(format!(
                        "relation [{na},{nb}]_{n}: word {} is not in normal form",
                        w.show(&p)
                    )));
                }
                let got = w.weight(&p);
                if got != expected {
                    return Err(VaError::WeightMismatch {
                        a: na,
                        b: nb,
                        n,
                        expected,
                        got,
                    });
                }
            }
            p.declared.insert((a, b, n), e);
        }
        p.complete()?;
        Ok(p)
    }

    // b(m)a = sum_j (-1)^{m+j+1} / j! * d^j (a(m+j)b), for a < b
    fn complete(&mut self) -> Result<(), VaError> {
        let mut ope = self.declared.clone();
        let k = self.generators.len();
        let mut engine = Engine::new(self);
        let mut extra = Vec::new();
        for a in 0..k {
            for b in (a + 1)..k {
                let entries: Vec<(i64, VAElement)> = self
                    .declared_between(a, b)
                    .map(|(j, e)| (j, e.clone()))
                    .collect();
                for m in 0..(self.weight(a) + self.weight(b)) {
                    let mut acc = VAElement::zero();
                    for (n, e) in &entries {
                        let j = n - m;
                        if j < 0 {
                            continue;
                        }
                        let d = engine.derivative_power(e, j as u32)?;
                        let c = sign(m + j + 1) / Q::from(factorial(j as u64));
                        acc.add_scaled(&d, &c);
                    }
                    if !acc.is_zero() {
                        extra.push(((b, a, m), acc));
                    }
                }
            }
        }
        ope.extend(extra);
        self.ope = ope;
        Ok(())
    }

    pub fn heisenberg(form: Vec<Vec<Q>>) -> Result<Presentation, VaError> {
        let r = form.len();
        if r == 0 || form.iter().any(|row| row.len() != r) {
            return Err(VaError::Schema("form must be a nonempty square matrix".into()));
        }
        for i in 0..r {
            for j in 0..r {
                if form[i][j] != form[j][i] {
                    return Err(VaError::Schema("form must be symmetric".into()));
                }
            }
        }
        let generators = (0..r)
            .map(|i| Generator {
                name: if r == 1 { "a".into() } else { format!("a{}", i + 1) },
                weight: 1,
            })
            .collect();
        let mut relations = Vec::new();
        for i in 0..r {
            for j in i..r {
                relations.push((i, j, 0, VAElement::zero()));
                relations.push((i, j, 1, VAElement::vacuum().scale(&form[i][j])));
            }
        }
        Presentation::new(generators, BTreeMap::new(), relations, None)
    }

    pub fn virasoro(c: Q) -> Result<Presentation, VaError> {
        let generators = vec![Generator {
            name: "L".into(),
            weight: 2,
        }];
        let l = |n: i64| VAElement::word(VAWord::new(vec![(0, n)]));
        let relations = vec![
            (0, 0, 0, l(-2)),
            (0, 0, 1, l(-1).scale(&q(2))),
            (0, 0, 2, VAElement::zero()),
            (0, 0, 3, VAElement::vacuum().scale(&(c.clone() * frac(1, 2)))),
        ];
        let central = BTreeMap::from([("c".to_string(), c)]);
        Presentation::new(generators, central, relations, None)
    }

    /// The rank-one lattice with `<lambda, lambda> = 2`, generated by
    /// `h = lambda(-1)1`, `e = e^lambda` and `f = -e^{-lambda}`.
    pub fn lattice_rank1(norm: i64) -> Result<Presentation, VaError> {
        if norm != 2 {
            return Err(VaError::Schema(format!(
                "lattice_rank1 supports norm 2 only, got {norm}"
            )));
        }
        let gen = |name: &str| Generator {
            name: name.into(),
            weight: 1,
        };
        let (h, e, f) = (0, 1, 2);
        let g = |x: Gen| VAElement::generator(x);
        let relations = vec![
            (h, h, 1, VAElement::vacuum().scale(&q(2))),
            (h, e, 0, g(e).scale(&q(2))),
            (h, f, 0, g(f).scale(&q(-2))),
            (e, f, 0, g(h)),
            (e, f, 1, VAElement::vacuum()),
        ];
        Presentation::new(
            vec![gen("h"), gen("e"), gen("f")],
            BTreeMap::new(),
            relations,
            Some(LatticeData { norm }),
        )
    }

    pub fn to_doc(&self) -> PresentationDoc {
        PresentationDoc {
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorDoc {
                    name: g.name.clone(),
                    weight: g.weight,
                })
                .collect(),
            central: self
                .central
                .iter()
                .map(|(k, v)| (k.clone(), fmt_rational(v)))
                .collect(),
            relations: self
                .declared
                .iter()
                .map(|(&(a, b, n), e)| RelationDoc {
                    a: self.name(a).into(),
                    b: self.name(b).into(),
                    n,
                    result: e
                        .terms()
                        .map(|(w, c)| ResultTermDoc {
                            coeff: fmt_rational(c),
                            word: w
                                .modes
                                .iter()
                                .map(|&(g, m)| (self.name(g).to_string(), m))
                                .collect(),
                            tail: "vacuum".into(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub generators: Vec<GeneratorDoc>,
    #[serde(default)]
    pub central: BTreeMap<String, String>,
    #[serde(default)]
    pub relations: Vec<RelationDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub name: String,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub a: String,
    pub b: String,
    pub n: i64,
    pub result: Vec<ResultTermDoc>,
}

/// `tail` is `"vacuum"` or a generator name `g`, standing for `g(-1)1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultTermDoc {
    pub coeff: String,
    #[serde(default)]
    pub word: Vec<(String, i64)>,
    #[serde(default = "vacuum_tail")]
    pub tail: String,
}

fn vacuum_tail() -> String {
    "vacuum".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresetDoc {
    preset: String,
    c: Option<String>,
    rank: Option<usize>,
    form: Option<Vec<Vec<String>>>,
    norm: Option<i64>,
}

fn rational_field(s: &str, what: &str) -> Result<Q, VaError> {
    parse_rational(s).map_err(|e| VaError::Schema(format!("{what}: {e}")))
}

/// Reads a presentation document or a preset request such as
/// `{"preset": "virasoro", "c": "1/2"}`.
pub fn load_presentation(doc: &Value) -> Result<Presentation, VaError> {
    let schema = |e: serde_json::Error| VaError::Schema(e.to_string());
    if doc.get("preset").is_some() {
        let pd: PresetDoc = serde_json::from_value(doc.clone()).map_err(schema)?;
        return match pd.preset.as_str() {
            "virasoro" => {
                let c = pd
                    .c
                    .ok_or_else(|| VaError::Schema("virasoro needs `c`".into()))?;
                Presentation::virasoro(rational_field(&c, "c")?)
            }
            "heisenberg" => {
                let form = match (pd.form, pd.rank) {
                    (Some(rows), _) => rows
                        .iter()
                        .map(|r| r.iter().map(|x| rational_field(x, "form")).collect())
                        .collect::<Result<Vec<Vec<Q>>, _>>()?,
                    (None, r) => {
                        let r = r.unwrap_or(1);
                        (0..r)
                            .map(|i| (0..r).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
                            .collect()
                    }
                };
                if let Some(r) = pd.rank {
                    if r != form.len() {
                        return Err(VaError::Schema("rank does not match form".into()));
                    }
                }
                Presentation::heisenberg(form)
            }
            "lattice_rank1" => Presentation::lattice_rank1(pd.norm.unwrap_or(2)),
            other => Err(VaError::Schema(format!("unknown preset `{other}`"))),
        };
    }
    let pd: PresentationDoc = serde_json::from_value(doc.clone()).map_err(schema)?;
    let generators: Vec<Generator> = pd
        .generators
        .iter()
        .map(|g| Generator {
            name: g.name.clone(),
            weight: g.weight,
        })
        .collect();
    let index = |name: &str| -> Result<Gen, VaError> {
        generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| VaError::UnknownGenerator(name.into()))
    };
    let mut central = BTreeMap::new();
    for (k, v) in &pd.central {
        central.insert(k.clone(), rational_field(v, k)?);
    }
    let mut relations = Vec::new();
    for r in &pd.relations {
        let (a, b) = (index(&r.a)?, index(&r.b)?);
        let mut e = VAElement::zero();
        for t in &r.result {
            let mut modes = Vec::new();
            for (g, m) in &t.word {
                modes.push((index(g)?, *m));
            }
            if t.tail != "vacuum" {
                modes.push((index(&t.tail)?, -1));
            }
            e.add_term(VAWord::new(modes), rational_field(&t.coeff, "coeff")?);
        }
        relations.push((a, b, r.n, e));
    }
    Presentation::new(generators, central, relations, None)
}
