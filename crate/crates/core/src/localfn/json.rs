use serde::{Deserialize, Serialize};

use super::{Factor, LocalFn, LocalFnError, LocalMonomial};
use crate::rational::{fmt_rational, parse_rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFnDoc {
    pub arity: usize,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub coeff: String,
    pub factors: Vec<FactorDoc>,
}

/// One factor per variable. `exp` is negative for `diff`; `base` is one-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDoc {
    pub kind: String,
    pub exp: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<usize>,
}

impl From<&LocalMonomial> for Vec<FactorDoc> {
    fn from(m: &LocalMonomial) -> Self {
        m.factors()
            .iter()
            .map(|f| match f {
                Factor::Pure(l) => FactorDoc {
                    kind: "pure".into(),
                    exp: *l as i64,
                    base: None,
                },
                Factor::Diff { base, order } => FactorDoc {
                    kind: "diff".into(),
                    exp: -(*order as i64),
                    base: Some(base + 1),
                },
            })
            .collect()
    }
}

pub(crate) fn monomial_from_docs(docs: &[FactorDoc]) -> Result<LocalMonomial, LocalFnError> {
    let bad = |m: usize, msg: &str| LocalFnError::Schema(format!("factor {}: {msg}", m + 1));
    let mut factors = Vec::with_capacity(docs.len());
    for (m, d) in docs.iter().enumerate() {
        let f = match d.kind.as_str() {
            "pure" if d.exp >= 0 => Factor::Pure(d.exp as u32),
            "pure" => return Err(bad(m, "pure exponent must be >= 0")),
            "diff" => {
                let base = d.base.ok_or_else(|| bad(m, "diff factor needs `base`"))?;
                if base == 0 || base > m || d.exp >= 0 {
                    return Err(bad(m, "diff factor needs 1 <= base < variable and exp < 0"));
                }
                Factor::Diff {
                    base: base - 1,
                    order: (-d.exp) as u32,
                }
            }
            other => return Err(bad(m, &format!("unknown kind `{other}`"))),
        };
        factors.push(f);
    }
    Ok(LocalMonomial::new(factors))
}

impl LocalFn {
    pub fn to_doc(&self) -> LocalFnDoc {
        LocalFnDoc {
            arity: self.arity(),
            terms: self
                .terms()
                .map(|(m, c)| TermDoc {
                    coeff: fmt_rational(c),
                    factors: m.into(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &LocalFnDoc) -> Result<LocalFn, LocalFnError> {
        let mut f = LocalFn::zero(doc.arity);
        for t in &doc.terms {
            if t.factors.len() != doc.arity {
                return Err(LocalFnError::Schema(format!(
                    "term has {} factors, arity is {}",
                    t.factors.len(),
                    doc.arity
                )));
            }
            let c = parse_rational(&t.coeff).map_err(|e| LocalFnError::Schema(e.to_string()))?;
            f.add_term(monomial_from_docs(&t.factors)?, c);
        }
        Ok(f)
    }
}
