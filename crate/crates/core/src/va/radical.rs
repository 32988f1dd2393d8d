use super::{spanning_basis, Engine, Gen, Presentation, VAElement, VAWord, VaError};
use crate::linalg::nullspace;
use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalSlice {
    pub weight: i64,
    pub basis: Vec<VAWord>,
    pub kernel: Vec<VAElement>,
    pub dimension: usize,
}

/// Weight-`w` part of the maximal positive ideal: spanning vectors all of
/// whose lowering images down to weight 0 vanish.
pub fn radical_slice(p: &Presentation, w: i64) -> Result<RadicalSlice, VaError> {
    slice(p, w, true)
}

pub(crate) fn slice(p: &Presentation, w: i64, ordered: bool) -> Result<RadicalSlice, VaError> {
    let basis = spanning_basis(p, w);
    let mut letters: Vec<(Gen, i64, i64)> = Vec::new();
    for g in 0..p.generators.len() {
        for m in p.weight(g)..(p.weight(g) + w.max(0)) {
            letters.push((g, m, m - p.weight(g) + 1));
        }
    }
    letters.sort_by_key(|&(g, m, _)| (m, g));
    let mut engine = Engine::new(p);
    let start: Vec<VAElement> = basis.iter().cloned().map(VAElement::word).collect();
    let mut rows = Vec::new();
    lower(&mut engine, &letters, 0, ordered, w, &start, &mut rows)?;
    let kernel: Vec<VAElement> = nullspace(&rows, basis.len())
        .into_iter()
        .map(|v| VAElement::from_terms(basis.iter().cloned().zip(v)))
        .collect();
    Ok(RadicalSlice {
        weight: w,
        dimension: kernel.len(),
        basis,
        kernel,
    })
}

// Applies lowering letters outermost-first; with `ordered`, the letter
// index never decreases from one application to the next.
fn lower(
    engine: &mut Engine<'_>,
    letters: &[(Gen, i64, i64)],
    from: usize,
    ordered: bool,
    left: i64,
    cols: &[VAElement],
    rows: &mut Vec<Vec<Q>>,
) -> Result<(), VaError> {
    if left == 0 {
        rows.push(cols.iter().map(|e| e.vacuum_coefficient()).collect());
        return Ok(());
    }
    let first = if ordered { from } else { 0 };
    for (i, &(g, m, drop)) in letters.iter().enumerate().skip(first) {
        if drop > left {
            continue;
        }
        engine.reset_steps();
        let next = cols
            .iter()
            .map(|e| engine.act_element(g, m, e))
            .collect::<Result<Vec<_>, _>>()?;
        if next.iter().all(|e| e.is_zero()) {
            continue;
        }
        lower(engine, letters, i, ordered, left - drop, &next, rows)?;
    }
    Ok(())
}
