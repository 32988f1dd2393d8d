use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::localfn::{basis_monomials, canonicalize_str, Factor, LocalMonomial, Permutation};
use crate::rational::{frac, q};
use crate::Q;

fn canon(s: &str, n: usize) -> LocalFn {
    canonicalize_str(s, n).unwrap()
}

fn mono(fs: Vec<Factor>) -> LocalMonomial {
    LocalMonomial::new(fs)
}

#[test]
fn insert_component_examples() {
    let f = canon("(z2-z1)^-1", 2);
    let t1 = insert_component(&f, 1, 1).unwrap();
    assert_eq!(t1.len(), 1);
    assert_eq!(
        t1.coefficient(
            &mono(vec![Factor::Pure(0), Factor::Diff { base: 0, order: 1 }]),
            &[mono(vec![Factor::Pure(0)])]
        ),
        q(1)
    );
    let t2 = insert_component(&f, 1, 2).unwrap();
    assert_eq!(t2.len(), 1);
    assert_eq!(
        t2.coefficient(
            &mono(vec![Factor::Pure(0), Factor::Diff { base: 0, order: 2 }]),
            &[mono(vec![Factor::Pure(1)])]
        ),
        q(-1)
    );
    assert!(insert_component(&f, 1, 0).unwrap().is_zero());
    assert_eq!(
        insert_component(&f, 2, 0),
        Err(CooperadError::BadSplit { m: 2, n: 2 })
    );
    assert_eq!(
        insert_component(&canon("1 + z1", 2), 1, 0),
        Err(CooperadError::NotHomogeneous)
    );
}

// Summing the components over a window of outer gradings must approach
// f(z_1, .., z_m, t + t_1, ..) when the t_s are small.
fn resummed(f: &LocalFn, m: usize, outer: &[Q], inner: &[Q], window: std::ops::RangeInclusive<i64>) -> Q {
    let mut total = Q::zero();
    for p in window {
        let t = insert_component(f, m, p).unwrap();
        for (o, i, c) in t.terms() {
            total += c * o.evaluate(outer) * i[0].evaluate(inner);
        }
    }
    total
}

#[test]
fn insertion_resums_to_the_function() {
    let cases = [
        ("(z3-z1)^-1*(z3-z2)^-2", 3, 1),
        ("z2^2*(z3-z2)^-1", 3, 1),
        ("(z2-z1)^-2*z3", 3, 2),
        ("(z4-z1)^-1*(z3-z2)^-1*(z4-z3)^-1", 4, 2),
    ];
    for (s, n, m) in cases {
        let f = canon(s, n);
        let g = f.homogeneous_grading().unwrap();
        let z: Vec<Q> = (0..m).map(|i| q(3 * i as i64 - 5)).collect();
        let t = frac(7, 2);
        let small: Vec<Q> = (0..n - m).map(|s| frac(s as i64 + 1, 1000)).collect();
        let mut outer = z.clone();
        outer.push(t.clone());
        let mut full = z.clone();
        full.extend(small.iter().map(|x| &t + x));
        let exact = f.evaluate(&full).unwrap();
        let approx = resummed(&f, m, &outer, &small, g - 3..=g + 12);
        let err = (exact.clone() - approx).abs();
        assert!(err < frac(1, 1_000_000_000) * (exact.abs() + q(1)), "{s}: error {err}");
    }
}

#[test]
fn cocompose_examples() {
    let f = canon("(z2-z1)^-1", 2);
    let t = cocompose_general(&f, &[1, 1], &[1, 0, 0]).unwrap();
    assert_eq!(t.len(), 1);
    let one1 = mono(vec![Factor::Pure(0)]);
    assert_eq!(
        t.coefficient(
            &mono(vec![Factor::Pure(0), Factor::Diff { base: 0, order: 1 }]),
            &[one1.clone(), one1.clone()]
        ),
        q(1)
    );
    let t = cocompose_general(&LocalFn::one(2), &[1, 1], &[0, 0, 0]).unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t.coefficient(&LocalMonomial::one(2), &[one1.clone(), one1]), q(1));
    let f = canon("(z2-z1)^-2", 2);
    assert!(matches!(
        cocompose_general(&f, &[2, 0], &[2, 0, 0]),
        Err(CooperadError::BadPartition(_))
    ));
    assert!(matches!(
        cocompose_general(&f, &[1, 1], &[1, 0, 0]),
        Err(CooperadError::BadMultidegree { .. })
    ));
}

#[test]
fn kernel_examples_and_routes() {
    let s = kernel_table(KernelKind::Symmetric, 2, 2);
    assert_eq!(s.coefficients[&(0, 0)], q(1));
    assert_eq!(s.coefficients[&(1, 1)], q(-2));
    let a = kernel_table(KernelKind::Associative, 2, 2);
    assert_eq!(a.coefficients[&(1, 2)], q(-3));
    for kind in [KernelKind::Symmetric, KernelKind::Associative] {
        for m in 0..=8 {
            for n in 0..=8 {
                let (x, y) = kernel_routes(kind, m, n);
                assert_eq!(x, y);
                assert_eq!(x, kernel_closed_form(kind, m, n));
            }
        }
    }
}

#[test]
fn filtration_level_examples() {
    let f = canon("(z2-z1)^-2", 2);
    assert_eq!(filtration_level(&f, &[0, 1]).unwrap(), 2);
    assert_eq!(filtration_level(&f, &[0]).unwrap(), 0);
    let g = canon("(z2-z1)^-1*(z3-z2)^-1", 3);
    assert_eq!(filtration_level(&g, &[0, 2]).unwrap(), 0);
    assert!(filtration_level(&g, &[]).is_err());
    assert!(filtration_level(&g, &[2, 1]).is_err());
}

// Each Wick term clears with four factors; the sum of pairwise orders is 12.
#[test]
fn filtration_level_of_sums() {
    let wick = canon(
        "(z2-z1)^-2*(z4-z3)^-2 + (z3-z1)^-2*(z4-z2)^-2 + (z4-z1)^-2*(z3-z2)^-2",
        4,
    );
    assert_eq!(filtration_level(&wick, &[0, 1, 2, 3]).unwrap(), 4);
    assert_eq!(filtration_level(&wick, &[0, 1, 2]).unwrap(), 2);
    assert_eq!(filtration_level(&wick, &[1, 3]).unwrap(), 2);
    // regular where z1 = z2, though both canonical terms carry (z2-z1)^-1
    let h = canon("(z3-z1)^-1*(z3-z2)^-1", 3);
    assert_eq!(h.len(), 2);
    assert_eq!(filtration_level(&h, &[0, 1]).unwrap(), 0);
    assert_eq!(filtration_level(&h, &[0, 1, 2]).unwrap(), 2);
}

#[test]
fn filtration_level_bounded_by_pairwise_orders() {
    use rand::Rng;
    let pool = basis_monomials(4, 2, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..30 {
        let mut f = LocalFn::zero(4);
        for _ in 0..3 {
            let m = LocalFn::monomial(pool[rng.gen_range(0..pool.len())].clone());
            f = f.add(&m).unwrap();
        }
        for mask in 1u32..16 {
            let s: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            let mut pairwise = 0;
            for (a, &i) in s.iter().enumerate() {
                for &j in &s[a + 1..] {
                    pairwise += f.pole_order(i, j).unwrap();
                }
            }
            assert!(filtration_level(&f, &s).unwrap() <= pairwise);
        }
    }
}

#[test]
fn filtration_level_is_monotone() {
    let f = canon("(z3-z1)^-1*(z3-z2)^-1 + (z4-z2)^-2*(z2-z1)^-1", 4);
    for mask in 1u32..16 {
        let s: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
        let base = filtration_level(&f, &s).unwrap();
        for extra in (0..4).filter(|i| mask >> i & 1 == 0) {
            let mut t = s.clone();
            t.push(extra);
            t.sort_unstable();
            assert!(filtration_level(&f, &t).unwrap() >= base);
        }
    }
}

#[test]
fn filtration_basis_examples() {
    assert!(filtration_basis(2, &[0, 1], 0, 1, 5).unwrap().is_empty());
    let d = mono(vec![Factor::Pure(0), Factor::Diff { base: 0, order: 1 }]);
    assert_eq!(filtration_basis(2, &[0, 1], 1, 1, 1).unwrap(), vec![d.clone()]);
    assert_eq!(filtration_basis(2, &[1], 0, 1, 1).unwrap(), vec![d]);
}

#[test]
fn filtration_basis_matches_filtered_enumeration() {
    for n in 1..=3usize {
        for mask in 1u32..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            for level in 0..=3 {
                for g in -1..=3 {
                    let want: Vec<LocalMonomial> = basis_monomials(n, g, 3)
                        .into_iter()
                        .filter(|m| {
                            filtration_level(&LocalFn::monomial(m.clone()), &s).unwrap() <= level
                        })
                        .collect();
                    assert_eq!(filtration_basis(n, &s, level, g, 3).unwrap(), want);
                }
            }
        }
    }
}

#[test]
fn in_connective_examples() {
    let sig = SortSignature::new(0, vec![1, 1]);
    assert!(in_connective(&canon("(z2-z1)^-2", 2), 0, &sig));
    let sig = SortSignature::new(1, vec![1, 1]);
    assert!(!in_connective(&canon("(z2-z1)^-3", 2), 0, &sig));
    for (a, b) in [(0, 0), (1, 2), (3, 1)] {
        let sig = SortSignature::new(a + b, vec![a, b]);
        assert!(in_connective(&LocalFn::one(2), 0, &sig));
    }
    // wrong grading
    assert!(!in_connective(&canon("(z2-z1)^-1", 2), 0, &SortSignature::new(0, vec![1, 1])));
}

#[test]
fn verify_examples() {
    let mut r = VerifyReport::default();
    let f = canon("(z2-z1)^-1", 2);
    check_commutativity(&mut r, &f, &[0], &[1], 4).unwrap();
    assert!(r.checks.len() > 0);
    check_equivariance(&mut r, &f, &Permutation::transposition(2, 0, 1), &[1], 4).unwrap();
    check_commutativity(&mut r, &LocalFn::one(3), &[0, 2], &[1], 4).unwrap();
    check_coassociativity(&mut r, &LocalFn::one(3), &[0, 1, 2], &[1], 4).unwrap();
    let f = canon("(z3-z1)^-1*(z3-z2)^-1", 3);
    let before = r.checks.len();
    check_coassociativity(&mut r, &f, &[1, 2], &[2], 3).unwrap();
    assert!(r.checks.len() > before);
    check_cocomposition(&mut r, &f, &[1, 2], 3).unwrap();
    check_cocomposition(&mut r, &f, &[1, 1, 1], 2).unwrap();
    assert_eq!(r.failures, 0, "{:#?}", r.checks.iter().filter(|c| c.status == "fail").collect::<Vec<_>>());
}

#[test]
fn verify_axioms_small_run() {
    let report = verify_axioms(&VerifyConfig {
        max_arity: 3,
        samples: 8,
        order: 2,
        seed: 7,
    })
    .unwrap();
    assert!(report.passed(), "{:#?}", report.checks.iter().find(|c| c.status == "fail"));
    let json = serde_json::to_string(&report).unwrap();
    let back: VerifyReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

#[test]
fn tensor_json_round_trip() {
    let f = canon("(z3-z1)^-1*(z3-z2)^-2", 3);
    let t = insert_component(&f, 1, 2).unwrap();
    assert!(!t.is_zero());
    let text = serde_json::to_string(&t.to_doc()).unwrap();
    assert!(text.contains("\"outer\""));
    assert!(text.contains("\"inner\""));
    let back = TensorElement::from_doc(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, t);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn insertion_gradings_add_up(seed in any::<u64>(), p in -3i64..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_monomial(&mut rng, 4);
        let n = f.arity();
        let g = f.homogeneous_grading().unwrap();
        for m in 0..n {
            let t = insert_component(&f, m, p).unwrap();
            for (o, i, _) in t.terms() {
                prop_assert_eq!(o.grading(), p);
                prop_assert_eq!(i[0].grading(), g - p);
            }
        }
    }

    #[test]
    fn equivariance_holds(seed in any::<u64>(), perm_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_monomial(&mut rng, 3);
        let n = f.arity();
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        let sigma = Permutation::new(images).unwrap();
        let mut r = VerifyReport::default();
        check_equivariance(&mut r, &f, &sigma, &[n - 1], 2).unwrap();
        if n >= 2 {
            check_equivariance(&mut r, &f, &sigma, &[0, n - 1], 2).unwrap();
        }
        prop_assert_eq!(r.failures, 0);
    }

    #[test]
    fn connective_closure_under_insertion(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_monomial(&mut rng, 3);
        let n = f.arity();
        let g = f.homogeneous_grading().unwrap();
        let sorts: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let sig = SortSignature::new(sorts.iter().sum::<i64>() - g, sorts.clone());
        prop_assume!(in_connective(&f, 0, &sig));
        let size = rng.gen_range(1..=n);
        let subset: Vec<usize> = (n - size..n).collect();
        for q in -3..=3 {
            let t = insert_at(&f, &subset, g - q).unwrap();
            let inner_sorts: Vec<i64> = subset.iter().map(|&v| sorts[v]).collect();
            let r = inner_sorts.iter().sum::<i64>() - q;
            let mut outer_sorts: Vec<i64> = (0..n - size).map(|v| sorts[v]).collect();
            outer_sorts.push(r);
            for (o, i, _) in t.terms() {
                let of = LocalFn::monomial(o.clone());
                let inf = LocalFn::monomial(i[0].clone());
                prop_assert!(in_connective(&of, 0, &SortSignature::new(sig.out_sort, outer_sorts.clone())), "{o}");
                prop_assert!(in_connective(&inf, 0, &SortSignature::new(r, inner_sorts.clone())), "{}", i[0]);
            }
        }
    }
}
