use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vertex_cooperad::cooperad::{
    in_connective, insert_at, kernel_routes, random_monomial, verify_axioms, KernelKind,
    SortSignature, VerifyConfig,
};
use vertex_cooperad::fock::{
    alpha_act, realization_dims, series_dims, virasoro_act, FockState, SeriesKind,
};
use vertex_cooperad::localfn::{canonicalize_str, LocalFn};
use vertex_cooperad::rational::{fmt_rational, frac, q};
use vertex_cooperad::va::{
    graded_dims, lattice_check, normal_form, npoint_vacuum, parse_element, radical_slice,
    spanning_basis, Engine, Presentation, VAElement, VAWord,
};
use vertex_cooperad::Q;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// Small integer binomial, kept apart from the library's own helper.
fn choose(n: u64, k: u64) -> i64 {
    if k > n {
        return 0;
    }
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

// ---- 1: random expressions, evaluated directly ----

enum Expr {
    Var(usize),
    Const(Q),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    // (z_i - z_j)^(-k)
    Pole(usize, usize, u32),
    Pow(Box<Expr>, u32),
}

impl Expr {
    fn text(&self) -> String {
        match self {
            Expr::Var(i) => format!("z{}", i + 1),
            Expr::Const(c) => format!("({})", fmt_rational(c)),
            Expr::Sum(v) => format!("({})", v.iter().map(Expr::text).collect::<Vec<_>>().join(" + ")),
            Expr::Prod(v) => v.iter().map(Expr::text).collect::<Vec<_>>().join("*"),
            Expr::Pole(i, j, k) => format!("(z{}-z{})^-{k}", i + 1, j + 1),
            Expr::Pow(e, k) => format!("({})^{k}", e.text()),
        }
    }

    fn eval(&self, z: &[Q]) -> Q {
        match self {
            Expr::Var(i) => z[*i].clone(),
            Expr::Const(c) => c.clone(),
            Expr::Sum(v) => v.iter().map(|e| e.eval(z)).fold(Q::zero(), |a, b| a + b),
            Expr::Prod(v) => v.iter().map(|e| e.eval(z)).fold(Q::one(), |a, b| a * b),
            Expr::Pole(i, j, k) => {
                let d = &z[*i] - &z[*j];
                (0..*k).fold(Q::one(), |a, _| a / &d)
            }
            Expr::Pow(e, k) => {
                let b = e.eval(z);
                (0..*k).fold(Q::one(), |a, _| a * &b)
            }
        }
    }
}

fn random_expr(rng: &mut ChaCha8Rng, n: usize, depth: u32) -> Expr {
    let leaf = |rng: &mut ChaCha8Rng| -> Expr {
        match rng.gen_range(0..4) {
            0 => Expr::Const(frac(rng.gen_range(-5..=5), rng.gen_range(1..=4))),
            1 => Expr::Var(rng.gen_range(0..n)),
            _ if n >= 2 => {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                Expr::Pole(i, j, rng.gen_range(1..=3))
            }
            _ => Expr::Var(0),
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..4) {
        0 => Expr::Sum((0..rng.gen_range(2..=3)).map(|_| random_expr(rng, n, depth - 1)).collect()),
        1 | 2 => Expr::Prod((0..rng.gen_range(2..=3)).map(|_| random_expr(rng, n, depth - 1)).collect()),
        _ => Expr::Pow(Box::new(random_expr(rng, n, depth - 1)), rng.gen_range(0..=2)),
    }
}

fn distinct_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    loop {
        let z: Vec<Q> = (0..n)
            .map(|_| frac(rng.gen_range(-40..=40), rng.gen_range(1..=7)))
            .collect();
        let distinct = (0..n).all(|i| (i + 1..n).all(|j| z[i] != z[j]));
        if distinct {
            return z;
        }
    }
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut evaluations = 0;
    for case in 0..200 {
        let n = rng.gen_range(1..=4);
        let e = random_expr(&mut rng, n, 3);
        let text = e.text();
        let f = canonicalize_str(&text, n).map_err(|err| format!("case {case}: {text}: {err}"))?;
        for _ in 0..20 {
            let z = distinct_points(&mut rng, n);
            let got = f.evaluate(&z).map_err(|err| err.to_string())?;
            ensure(got == e.eval(&z), || format!("case {case}: {text} at {z:?}"))?;
            evaluations += 1;
        }
    }
    Ok(format!("200 expressions, {evaluations} evaluations"))
}

// ---- 2: expansion kernels ----

fn criterion_2() -> Check {
    for m in 0..=8u32 {
        for n in 0..=8u32 {
            let sym = q(choose((m + n) as u64, n as u64) * if n % 2 == 0 { 1 } else { -1 });
            let asc = q(-choose((m + n) as u64, m as u64));
            for (kind, want) in [(KernelKind::Symmetric, sym), (KernelKind::Associative, asc)] {
                let (a, b) = kernel_routes(kind, m, n);
                ensure(a == b && a == want, || {
                    format!("{kind:?} ({m},{n}): {} / {} vs {}", a, b, want)
                })?;
            }
        }
    }
    Ok("162 coefficients".into())
}

// ---- 3: co-operad axioms ----

fn criterion_3() -> Check {
    let config = VerifyConfig { max_arity: 4, samples: 50, order: 4, seed: 3 };
    let report = verify_axioms(&config).map_err(|e| e.to_string())?;
    ensure(report.passed() && report.failures == 0, || {
        let first = report.checks.iter().find(|c| c.status != "pass");
        format!("{} failures, first {first:?}", report.failures)
    })?;
    Ok(format!(
        "{} nonzero components, {} zero",
        report.checks.len(),
        report.zero_components
    ))
}

// ---- 4: connectivity closure ----

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut accepted = 0;
    let mut components = 0;
    while accepted < 50 {
        let f = random_monomial(&mut rng, 4);
        let n = f.arity();
        let g = f.homogeneous_grading().unwrap();
        let sorts: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let sig = SortSignature::new(sorts.iter().sum::<i64>() - g, sorts.clone());
        if !in_connective(&f, 0, &sig) {
            continue;
        }
        accepted += 1;
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        let mut subset: Vec<usize> = all[..rng.gen_range(1..=n)].to_vec();
        subset.sort_unstable();
        let rest: Vec<usize> = (0..n).filter(|v| !subset.contains(v)).collect();
        let inner_sorts: Vec<i64> = subset.iter().map(|&v| sorts[v]).collect();
        for qq in -4..=4 {
            let t = insert_at(&f, &subset, g - qq).map_err(|e| e.to_string())?;
            let r = inner_sorts.iter().sum::<i64>() - qq;
            let mut outer_sorts: Vec<i64> = rest.iter().map(|&v| sorts[v]).collect();
            outer_sorts.push(r);
            for (o, i, _) in t.terms() {
                components += 1;
                let of = LocalFn::monomial(o.clone());
                let inf = LocalFn::monomial(i[0].clone());
                ensure(
                    in_connective(&of, 0, &SortSignature::new(sig.out_sort, outer_sorts.clone())),
                    || format!("outer factor {o} of {f} at {subset:?}"),
                )?;
                ensure(
                    in_connective(&inf, 0, &SortSignature::new(r, inner_sorts.clone())),
                    || format!("inner factor {} of {f} at {subset:?}", i[0]),
                )?;
            }
        }
    }
    Ok(format!("50 functions, {components} factor pairs"))
}

// ---- 5: graded dimensions ----

fn criterion_5() -> Check {
    let h = Presentation::heisenberg(vec![vec![q(1)]]).map_err(|e| e.to_string())?;
    let hd: Vec<u64> = graded_dims(&h, 10).into_iter().map(|d| d as u64).collect();
    let want_h = vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
    ensure(hd == want_h && hd == series_dims(SeriesKind::Partitions, 10), || {
        format!("heisenberg {hd:?}")
    })?;
    let v = Presentation::virasoro(frac(1, 2)).map_err(|e| e.to_string())?;
    let vd: Vec<u64> = graded_dims(&v, 8).into_iter().map(|d| d as u64).collect();
    let want_v = vec![1, 0, 1, 1, 2, 2, 4, 4, 7];
    ensure(vd == want_v && vd == series_dims(SeriesKind::PartitionsMinPart2, 8), || {
        format!("virasoro {vd:?}")
    })?;
    Ok(format!("heisenberg {hd:?}, virasoro {vd:?}"))
}

// ---- 6: normal forms against the Fock space ----

fn fock_image(x: &VAElement, act: &dyn Fn(i64, &FockState) -> FockState) -> FockState {
    let mut out = FockState::zero();
    for (word, c) in x.terms() {
        let mut s = FockState::vacuum();
        for &(_, n) in word.modes.iter().rev() {
            s = act(n, &s);
        }
        out.add_scaled(&s, c);
    }
    out
}

// All orderings of each spanning word, plus each spanning word hit by one
// further mode, up to the given weight.
fn words_up_to(p: &Presentation, max_weight: i64) -> Vec<VAWord> {
    let mut out = Vec::new();
    for wt in 0..=max_weight {
        for b in spanning_basis(p, wt) {
            permutations(&b.modes, &mut Vec::new(), &mut vec![false; b.modes.len()], &mut out);
            for n in -3..=4 {
                let mut m = vec![(0, n)];
                m.extend(b.modes.iter().copied());
                let w = VAWord::new(m);
                if (0..=max_weight).contains(&w.weight(p)) {
                    out.push(w);
                }
            }
        }
    }
    out.sort_by(|a, b| a.modes.cmp(&b.modes));
    out.dedup();
    out
}

fn permutations(
    src: &[(usize, i64)],
    cur: &mut Vec<(usize, i64)>,
    used: &mut Vec<bool>,
    out: &mut Vec<VAWord>,
) {
    if cur.len() == src.len() {
        out.push(VAWord::new(cur.clone()));
        return;
    }
    for i in 0..src.len() {
        if !used[i] {
            used[i] = true;
            cur.push(src[i]);
            permutations(src, cur, used, out);
            cur.pop();
            used[i] = false;
        }
    }
}

fn criterion_6() -> Check {
    let mut total = 0;
    let h = Presentation::heisenberg(vec![vec![q(1)]]).map_err(|e| e.to_string())?;
    let v = Presentation::virasoro(q(1)).map_err(|e| e.to_string())?;
    let cases: [(&Presentation, &dyn Fn(i64, &FockState) -> FockState); 2] = [
        (&h, &|n, s| alpha_act(1, n, s)),
        (&v, &|n, s| virasoro_act(1, n, s)),
    ];
    for (p, act) in cases {
        for word in words_up_to(p, 6) {
            let nf = normal_form(p, &word).map_err(|e| e.to_string())?;
            let direct = fock_image(&VAElement::word(word.clone()), act);
            ensure(fock_image(&nf, act) == direct, || word.show(p))?;
            total += 1;
        }
    }
    Ok(format!("{total} words"))
}

// ---- 7: bracket identities ----

fn random_element(p: &Presentation, rng: &mut ChaCha8Rng, max_weight: i64) -> VAElement {
    loop {
        let basis = spanning_basis(p, rng.gen_range(1..=max_weight));
        if basis.is_empty() {
            continue;
        }
        let mut x = VAElement::zero();
        for _ in 0..rng.gen_range(1..=2) {
            let c = q(rng.gen_range(1..4) * if rng.gen_bool(0.5) { 1 } else { -1 });
            x.add_term(basis.choose(rng).unwrap().clone(), c);
        }
        if !x.is_zero() {
            return x;
        }
    }
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let presets = [
        Presentation::heisenberg(vec![vec![q(1)]]),
        Presentation::virasoro(frac(-22, 5)),
        Presentation::lattice_rank1(2),
    ];
    for p in presets {
        let p = p.map_err(|e| e.to_string())?;
        let mut eng = Engine::new(&p);
        let br = |e: &mut Engine, x: &VAElement, y: &VAElement, n: i64| {
            e.reset_steps();
            e.bracket(x, y, n).map_err(|err| err.to_string())
        };
        for t in 0..100 {
            let a = random_element(&p, &mut rng, 3);
            let b = random_element(&p, &mut rng, 3);
            let c = random_element(&p, &mut rng, 2);
            let m = rng.gen_range(-3..=3);
            let n = rng.gen_range(-3..=3);
            let ctx = || format!("triple {t}: a={} b={} c={} m={m} n={n}", a.show(&p), b.show(&p), c.show(&p));

            let bc = br(&mut eng, &b, &c, n)?;
            let ac = br(&mut eng, &a, &c, m)?;
            let lhs = br(&mut eng, &a, &bc, m)?.sub(&br(&mut eng, &b, &ac, n)?);
            let mut rhs = VAElement::zero();
            for i in 0..=(a.weight(&p).unwrap() + b.weight(&p).unwrap()) {
                let ab = br(&mut eng, &a, &b, i)?;
                let coeff = if m >= 0 { q(choose(m as u64, i as u64)) } else {
                    // binom(m, i) for negative m
                    let mut r = Q::one();
                    for k in 0..i {
                        r = r * q(m - k) / q(k + 1);
                    }
                    r
                };
                rhs.add_scaled(&br(&mut eng, &ab, &c, m + n - i)?, &coeff);
            }
            ensure(lhs == rhs, || format!("jacobi, {}", ctx()))?;

            // b(m)a = sum_j (-1)^(m+j+1) / j! d^j (a(m+j)b)
            let mut skew = VAElement::zero();
            let mut fact = Q::one();
            for j in 0..=(a.weight(&p).unwrap() + b.weight(&p).unwrap() - m).max(0) {
                if j > 0 {
                    fact *= q(j);
                }
                let mut d = br(&mut eng, &a, &b, m + j)?;
                for _ in 0..j {
                    d = eng.derivative(&d).map_err(|e| e.to_string())?;
                }
                let s = if (m + j + 1).rem_euclid(2) == 0 { q(1) } else { q(-1) };
                skew.add_scaled(&d, &(s / &fact));
            }
            ensure(br(&mut eng, &b, &a, m)? == skew, || format!("skew symmetry, {}", ctx()))?;

            let da = eng.derivative(&a).map_err(|e| e.to_string())?;
            let db = eng.derivative(&b).map_err(|e| e.to_string())?;
            let lhs = br(&mut eng, &da, &b, n)?;
            let rhs = br(&mut eng, &a, &b, n - 1)?.scale(&q(-n));
            ensure(lhs == rhs, || format!("derivative rule, {}", ctx()))?;
            let abn = br(&mut eng, &a, &b, n)?;
            let lhs = eng.derivative(&abn).map_err(|e| e.to_string())?;
            let rhs = br(&mut eng, &da, &b, n)?.add(&br(&mut eng, &a, &db, n)?);
            ensure(lhs == rhs, || format!("leibniz rule, {}", ctx()))?;
        }
    }
    Ok("300 triples".into())
}

// ---- 8: the weight 4 null vector ----

fn criterion_8() -> Check {
    let p = Presentation::virasoro(frac(-22, 5)).map_err(|e| e.to_string())?;
    let r = radical_slice(&p, 4).map_err(|e| e.to_string())?;
    ensure(r.dimension == 1 && r.kernel.len() == 1, || format!("dimension {}", r.dimension))?;
    let want = parse_element(&p, "L(-1)L(-1)1 - 3/5 * L(-3)1").map_err(|e| e.to_string())?;
    let k = &r.kernel[0];
    let (word, c) = want.terms().next().unwrap();
    let lead = k.coefficient(word);
    ensure(!lead.is_zero() && k.scale(&(c / &lead)) == want, || {
        format!("kernel {}", k.show(&p))
    })?;
    let one = Presentation::virasoro(q(1)).map_err(|e| e.to_string())?;
    let r1 = radical_slice(&one, 4).map_err(|e| e.to_string())?;
    ensure(r1.dimension == 0, || format!("c=1 dimension {}", r1.dimension))?;
    Ok(format!("c=-22/5: {}; c=1: 0", k.show(&p)))
}

// ---- 9: correlators ----

fn criterion_9() -> Check {
    let mut lines = Vec::new();
    let mut check = |p: &Presentation, gens: &[usize], bound: u32, want: &str| -> Result<(), String> {
        let r = gens.len();
        let f = npoint_vacuum(p, gens, bound).map_err(|e| e.to_string())?;
        let w = canonicalize_str(want, r).map_err(|e| e.to_string())?;
        ensure(f == w, || format!("got {f}, want {want}"))?;
        let weights = gens.iter().map(|&g| p.weight(g)).collect();
        ensure(in_connective(&f, 0, &SortSignature::new(0, weights)), || {
            format!("{f} not in the connective part")
        })?;
        lines.push(f.to_string());
        Ok(())
    };
    let h3 = Presentation::heisenberg(vec![vec![q(3)]]).map_err(|e| e.to_string())?;
    check(&h3, &[0, 0], 4, "3*(z2-z1)^-2")?;
    let v = Presentation::virasoro(frac(7, 3)).map_err(|e| e.to_string())?;
    check(&v, &[0, 0], 6, "7/6*(z2-z1)^-4")?;
    let h = Presentation::heisenberg(vec![vec![q(1)]]).map_err(|e| e.to_string())?;
    check(
        &h,
        &[0, 0, 0, 0],
        4,
        "(z2-z1)^-2*(z4-z3)^-2 + (z3-z1)^-2*(z4-z2)^-2 + (z4-z1)^-2*(z3-z2)^-2",
    )?;
    Ok(format!("{} correlators", lines.len()))
}

// ---- 10: rank one lattice ----

fn criterion_10() -> Check {
    let dims = realization_dims(2, 3).map_err(|e| e.to_string())?;
    let theta: Vec<usize> = series_dims(SeriesKind::ThetaOverEta(2), 3)
        .into_iter()
        .map(|d| d as usize)
        .collect();
    ensure(dims == vec![1, 3, 4, 7] && dims == theta, || format!("dims {dims:?}"))?;
    let p = Presentation::lattice_rank1(2).map_err(|e| e.to_string())?;
    let report = lattice_check(&p, 4).map_err(|e| e.to_string())?;
    let required: Vec<_> = report.checks.iter().filter(|c| c.relation != "literal").collect();
    ensure(report.passed() && !required.is_empty(), || {
        let bad: Vec<_> = required.iter().filter(|c| !c.passed).collect();
        format!("failing relations {bad:?}")
    })?;
    ensure(report.dims.len() >= 4 && report.dims[..4] == dims[..], || {
        format!("report dims {:?}", report.dims)
    })?;
    Ok(format!("dims {dims:?}, {} relation checks", required.len()))
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, u64, fn() -> Check); 10] = [
        (1, "canonical form soundness", 10, criterion_1),
        (2, "expansion kernel identities", 1, criterion_2),
        (3, "co-operad axioms", 60, criterion_3),
        (4, "connectivity closure", 60, criterion_4),
        (5, "graded dimensions", 5, criterion_5),
        (6, "normal forms against the Fock space", 120, criterion_6),
        (7, "bracket identities", 120, criterion_7),
        (8, "weight 4 null vector", 10, criterion_8),
        (9, "vacuum correlators", 30, criterion_9),
        (10, "rank one lattice", 60, criterion_10),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(budget);
        let (tag, detail) = match (&result, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        println!("{tag} {id:>2} {name} ({:.2} s, budget {budget} s): {detail}", took.as_secs_f64());
        if tag == "FAIL" {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
