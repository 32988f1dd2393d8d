use serde::Serialize;

use super::{Engine, Presentation, VAElement, VaError};
use crate::fock::{alpha_act, lattice_vertex_act, realization_dims, FockError, FockState};
use crate::rational::{fmt_rational, q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    /// `vanishing`, `normalization`, or `literal` for the reading
    /// `(lambda)(n)(mu) = 0 when n < -<lambda, mu>`, reported but not required.
    pub relation: String,
    pub lambda: i64,
    pub mu: i64,
    pub mode: i64,
    pub expected: String,
    pub realization: String,
    pub presentation: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeReport {
    pub cutoff: i64,
    pub checks: Vec<RelationCheck>,
    /// Spans reachable from the vacuum in the realization, weights `0..=cutoff`.
    pub dims: Vec<usize>,
}

impl LatticeReport {
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.relation != "literal")
            .all(|c| c.passed)
    }
}

fn truncation(e: FockError) -> VaError {
    match e {
        FockError::TruncationTooSmall { needed, cutoff } => {
            VaError::TruncationTooSmall { needed, cutoff }
        }
        other => VaError::Schema(other.to_string()),
    }
}

/// Image of a normal-form element in the lattice Fock space, with
/// `h = lambda(-1)1`, `e = e^lambda`, `f = -e^{-lambda}`.
pub fn realize(p: &Presentation, x: &VAElement, cutoff: i64) -> Result<FockState, VaError> {
    let norm = p.lattice.as_ref().ok_or(VaError::NotLattice)?.norm;
    let (h, e, f) = lattice_gens(p)?;
    let mut out = FockState::zero();
    for (w, c) in x.terms() {
        let mut s = FockState::vacuum();
        for &(g, n) in w.modes.iter().rev() {
            s = if g == h {
                alpha_act(norm, n, &s)
            } else if g == e {
                lattice_vertex_act(norm, 1, n, &s, cutoff).map_err(truncation)?
            } else {
                debug_assert_eq!(g, f);
                lattice_vertex_act(norm, -1, n, &s, cutoff)
                    .map_err(truncation)?
                    .scale(&q(-1))
            };
        }
        out.add_scaled(&s, c);
    }
    Ok(out)
}

fn lattice_gens(p: &Presentation) -> Result<(usize, usize, usize), VaError> {
    let get = |n: &str| p.generator_index(n).ok_or(VaError::NotLattice);
    Ok((get("h")?, get("e")?, get("f")?))
}

fn show_fock(s: &FockState) -> String {
    if s.is_zero() {
        return "0".into();
    }
    s.terms()
        .map(|((parts, label), c)| format!("{} [{:?}; {}]", fmt_rational(c), parts, label))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Checks `(lambda)(n)(mu) = 0` for `n >= -<lambda, mu>` and
/// `(lambda)(1)(-lambda) = 1` in the Fock realization, truncated at weight
/// `cutoff`, and compares each value with the presentation's own bracket.
pub fn lattice_check(p: &Presentation, cutoff: i64) -> Result<LatticeReport, VaError> {
    let norm = p.lattice.as_ref().ok_or(VaError::NotLattice)?.norm;
    if norm != 2 {
        return Err(VaError::NotLattice);
    }
    let (_, e, f) = lattice_gens(p)?;
    let gen_of = |s: i64| if s > 0 { e } else { f };
    let mut engine = Engine::new(p);
    let mut checks = Vec::new();
    let mut run = |relation: &str, lam: i64, mu: i64, n: i64, expected: FockState| {
        let x = VAElement::generator(gen_of(lam));
        let y = VAElement::generator(gen_of(mu));
        let ystate = realize(p, &y, cutoff)?;
        let k = lam;
        let mut realization = lattice_vertex_act(norm, k, n, &ystate, cutoff).map_err(truncation)?;
        if lam < 0 {
            realization = realization.scale(&q(-1));
        }
        let pres = engine.bracket(&x, &y, n)?;
        let pres_fock = realize(p, &pres, cutoff)?;
        let ok = if relation == "literal" {
            realization.is_zero()
        } else {
            realization == expected && pres_fock == realization
        };
        checks.push(RelationCheck {
            relation: relation.into(),
            lambda: lam,
            mu,
            mode: n,
            expected: show_fock(&expected),
            realization: show_fock(&realization),
            presentation: pres.show(p),
            passed: ok,
        });
        Ok::<(), VaError>(())
    };
    for lam in [1, -1] {
        for mu in [1, -1] {
            let pairing = norm * lam * mu;
            for n in -pairing..=(-pairing + 2) {
                run("vanishing", lam, mu, n, FockState::zero())?;
            }
        }
    }
    run("normalization", 1, -1, norm / 2, FockState::vacuum())?;
    for lam in [1, -1] {
        run("literal", lam, lam, -norm - 1, FockState::zero())?;
    }
    let dims = realization_dims(norm, cutoff).map_err(truncation)?;
    Ok(LatticeReport {
        cutoff,
        checks,
        dims,
    })
}
