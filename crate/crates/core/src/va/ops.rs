use super::{Engine, Gen, Presentation, VAElement, VAWord, VaError};

pub fn normal_form(p: &Presentation, w: &VAWord) -> Result<VAElement, VaError> {
    Engine::new(p).normal_form(w)
}

pub fn derivative(p: &Presentation, x: &VAElement) -> Result<VAElement, VaError> {
    Engine::new(p).derivative(x)
}

/// `x(n) y` in normal form.
pub fn bracket(p: &Presentation, x: &VAElement, y: &VAElement, n: i64) -> Result<VAElement, VaError> {
    Engine::new(p).bracket(x, y, n)
}

/// Normal-form words of weight `w`, in increasing order.
pub fn spanning_basis(p: &Presentation, w: i64) -> Vec<VAWord> {
    let mut out = Vec::new();
    if w < 0 {
        return out;
    }
    // the innermost mode comes last; build outward-in so that each new
    // prefix mode is >= (mode, gen) of its successor
    let mut letters: Vec<(Gen, i64, i64)> = Vec::new();
    for g in 0..p.generators.len() {
        let wt = p.weight(g);
        for n in (-(w - wt + 1)..0).rev() {
            let lw = wt - n - 1;
            if lw >= 1 && lw <= w {
                letters.push((g, n, lw));
            }
        }
    }
    // order letters so that a normal word reads as a non-increasing
    // sequence in (mode, gen)
    letters.sort_by(|x, y| (x.1, x.0).cmp(&(y.1, y.0)));
    fn rec(
        letters: &[(Gen, i64, i64)],
        max_idx: usize,
        left: i64,
        cur: &mut Vec<(Gen, i64)>,
        out: &mut Vec<VAWord>,
    ) {
        if left == 0 {
            out.push(VAWord::new(cur.clone()));
            return;
        }
        for i in 0..max_idx {
            let (g, n, lw) = letters[i];
            if lw <= left {
                cur.push((g, n));
                rec(letters, i + 1, left - lw, cur, out);
                cur.pop();
            }
        }
    }
    rec(&letters, letters.len(), w, &mut Vec::new(), &mut out);
    out.sort();
    out
}

pub fn graded_dims(p: &Presentation, w_max: i64) -> Vec<usize> {
    (0..=w_max).map(|w| spanning_basis(p, w).len()).collect()
}

/// Nonzero `a(n)b` for `n >= 0`.
pub fn ope_singular(p: &Presentation, a: Gen, b: Gen) -> Vec<(i64, VAElement)> {
    p.ope_pairs(a, b)
}

/// Largest `n` with `a(n)b != 0`, or `-1`.
pub fn check_uniform_bound(p: &Presentation, a: Gen, b: Gen) -> i64 {
    ope_singular(p, a, b).last().map_or(-1, |(n, _)| *n)
}
