use std::collections::BTreeMap;

use num_rational::BigRational;
use proptest::prelude::*;
use twistlab_core::builders::{
    build_almost_null, build_derivation_tower, build_ore, square_shift_derivation,
    word_is_derivation, DerivSpec, EndoSpec,
};
use twistlab_core::dual::{classify_dual, q_from_solution, solve_c, verify_iota_axioms, IotaPair};
use twistlab_core::planes::{
    classify_almost_null, detect_obstruction, shift_equivalence, shift_matrix_closed,
    shift_matrix_generic, PlaneVerdict, ShiftParams,
};
use twistlab_core::twist::{verify_axioms, AlphaFamily, Base, VerifyParams};
use twistlab_core::{BiPoly, Poly, RingDescriptor, RingValue};

const Q: RingDescriptor = RingDescriptor::Rationals;

fn qv(x: i64) -> RingValue {
    RingValue::from_i64(Q, x)
}

fn px(s: &str) -> Poly {
    Poly::parse(Q, s).unwrap()
}

fn matrix(max: usize) -> impl Strategy<Value = BiPoly> {
    proptest::collection::vec((0..=max, 0..=max, -3i64..4), 0..6)
        .prop_map(|ts| BiPoly::from_terms(Q, ts.into_iter().map(|(i, j, c)| (i, j, qv(c)))))
}

fn almost_null() -> impl Strategy<Value = BiPoly> {
    proptest::collection::vec((2usize..5, 2usize..5, -3i64..4), 1..4)
        .prop_map(|ts| BiPoly::from_terms(Q, ts.into_iter().map(|(i, j, c)| (i, j, qv(c)))))
        .prop_filter("nonzero", |q| !q.is_zero())
}

fn shift() -> impl Strategy<Value = ShiftParams> {
    (-3i64..4, 1i64..3, -3i64..4).prop_map(|(a, b, x)| {
        ShiftParams::new(RingValue::from_ratio(Q, &a.into(), &b.into()).unwrap(), qv(x))
    })
}

/// `(α, {1: β_1, 2: β_2})` on `k[t]/(t^6)` with `α(t) = c·t`; the images
/// have orders `2` and `4`, so `β_1(a)β_2(b)` and `β_2(a)β_2(b)` vanish.
fn tower_input(c: i64, b1: i64, b2: i64) -> (EndoSpec, BTreeMap<usize, DerivSpec>) {
    let base = Base::Quot(6);
    let alpha = EndoSpec::new(base, Poly::monomial(qv(c), 1)).unwrap();
    let mut betas = BTreeMap::new();
    for (i, img) in [(1usize, Poly::monomial(qv(b1), 2)), (2, Poly::monomial(qv(b2), 4))] {
        let psi = alpha.power(i as i64 + 1).unwrap();
        betas.insert(i, DerivSpec::new(alpha.clone(), psi, img).unwrap());
    }
    (alpha, betas)
}

fn dual_pair() -> impl Strategy<Value = (Poly, Poly)> {
    let generic = (proptest::collection::vec(-2i64..3, 1..4), proptest::collection::vec(-2i64..3, 0..9))
        .prop_map(|(p, q)| (Poly::from_i64s(Q, &p), Poly::from_i64s(Q, &q)));
    let zero_q = proptest::collection::vec(-2i64..3, 0..5).prop_map(|p| (Poly::from_i64s(Q, &p), Poly::zero(Q)));
    let even_q = proptest::collection::vec(-2i64..3, 0..5).prop_map(|cs| {
        let q = Poly::from_terms(Q, cs.into_iter().enumerate().map(|(i, c)| (2 * i, qv(c))));
        (px("-Y"), q)
    });
    let shifted = (1usize..5, proptest::collection::vec(-3i64..4, 5), 1i64..4, any::<bool>()).prop_map(
        |(half, ks, p0, perturb)| {
            let m = 2 * half;
            let sol = solve_c(m).unwrap();
            let mut y = vec![BigRational::from_integer(0.into()); m + 1];
            for (b, k) in sol.basis.iter().zip(ks) {
                for (yi, bi) in y.iter_mut().zip(b) {
                    *yi += BigRational::from_integer(k.into()) * bi;
                }
            }
            let mut q = q_from_solution(&y, &BigRational::from_integer(p0.into())).unwrap();
            if perturb {
                q.add_term(1, &qv(1));
            }
            (&px("-Y") + &Poly::constant(qv(p0)), q)
        },
    );
    prop_oneof![generic, zero_q, even_q, shifted]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shift_routes_agree(q in matrix(4), sp in shift()) {
        let fam = AlphaFamily::from_q(Base::PolyX, &q).unwrap();
        prop_assert_eq!(shift_matrix_generic(&fam, &sp).unwrap(), shift_matrix_closed(&q, &sp));
    }

    #[test]
    fn shift_then_unshift_is_identity(q in matrix(3), sp in shift()) {
        let fam = AlphaFamily::from_q(Base::PolyX, &q).unwrap();
        let there = shift_equivalence(&fam, &sp).unwrap();
        let back = shift_equivalence(&there, &sp.negated()).unwrap();
        prop_assert_eq!(back.q_matrix(), q);
    }

    #[test]
    fn disguised_almost_null_is_recovered(q0 in almost_null(), l in -2i64..3, x in -2i64..3) {
        let sp = ShiftParams::new(qv(l), qv(x));
        let q = shift_matrix_closed(&q0, &sp.negated());
        let c = classify_almost_null(&q).unwrap();
        let PlaneVerdict::AlmostNull { params, shifted } = &c.verdict else {
            return Err(TestCaseError::fail(format!("{q}: {:?}", c.verdict)));
        };
        prop_assert!(shifted.terms().all(|(i, j, _)| i >= 2 && j >= 2));
        let fam = shift_equivalence(&AlphaFamily::from_q(Base::PolyX, &q).unwrap(), params).unwrap();
        prop_assert!(verify_axioms(&fam, &VerifyParams::new(8)).is_verified());
    }

    #[test]
    fn ore_extensions_verify(a in prop_oneof![Just(1i64), Just(2), Just(-1)], b in -2i64..3, d in proptest::collection::vec(-2i64..3, 1..3)) {
        let alpha = EndoSpec::new(Base::PolyX, Poly::from_i64s(Q, &[b, a])).unwrap();
        let id = EndoSpec::identity(Base::PolyX, Q);
        let delta = DerivSpec::new(alpha.clone(), id, Poly::from_i64s(Q, &d)).unwrap();
        let fam = build_ore(&alpha, &delta).unwrap();
        let r = verify_axioms(&fam, &VerifyParams::new(10));
        prop_assert!(r.is_verified(), "{:?}", r);
    }

    #[test]
    fn almost_null_builder_verifies(q in almost_null()) {
        let fam = build_almost_null(&q).unwrap();
        prop_assert!(verify_axioms(&fam, &VerifyParams::new(10)).is_verified());
    }

    #[test]
    fn towers_verify_and_words_are_twisted_derivations(c in 1i64..4, b1 in 1i64..4, b2 in -3i64..4) {
        let (alpha, betas) = tower_input(c, b1, b2);
        let (fam, rep) = build_derivation_tower(&alpha, &betas, 8, 6).unwrap();
        prop_assert!(rep.exact_bound.is_some());
        prop_assert!(verify_axioms(&fam, &VerifyParams::new(10)).is_verified());
        for word in [vec![2], vec![1, 2], vec![2, 1], vec![1, 1, 2]] {
            prop_assert!(word_is_derivation(&alpha, &betas, &word, 6).unwrap(), "{:?}", word);
        }
    }

    #[test]
    fn dual_classification_matches_axioms((p, q) in dual_pair()) {
        let m = q.degree().finite().unwrap_or(0);
        let verdict = classify_dual(&p, &q);
        let rep = verify_iota_axioms(&IotaPair::new(p.clone(), q.clone()).unwrap(), 2 * m + 4);
        prop_assert_eq!(verdict.is_valid(), rep.is_verified(), "P={} Q={} {:?}", p, q, verdict);
    }
}

#[test]
fn null_vectors_give_valid_pairs() {
    for m in [2, 4, 6, 8] {
        let sol = solve_c(m).unwrap();
        for p0 in [1i64, -2, 3] {
            let p0r = BigRational::from_integer(p0.into());
            for y in &sol.basis {
                let q = q_from_solution(y, &p0r).unwrap();
                let p = &px("-Y") + &Poly::constant(qv(p0));
                assert!(classify_dual(&p, &q).is_valid(), "m={m} p0={p0} Q={q}");
            }
        }
    }
}

#[test]
fn derivation_over_inverse_alpha_is_nilpotent() {
    for n in 2..=7 {
        for c in [1i64, 2, -3] {
            let base = Base::Quot(n);
            let alpha = EndoSpec::new(base, Poly::monomial(qv(c), 1)).unwrap();
            let inv = alpha.inverse().unwrap();
            let d = if c == 1 {
                square_shift_derivation(Q, n).unwrap()
            } else {
                DerivSpec::new(alpha.clone(), alpha.power(2).unwrap(), Poly::monomial(qv(1), 2)).unwrap()
            };
            for k in 0..n {
                let mut v = Poly::monomial(qv(1), k);
                for _ in 0..n {
                    v = d.apply(&inv.apply(&v));
                }
                assert!(v.is_zero(), "n={n} c={c} t^{k}");
            }
        }
    }
}

#[test]
fn obstructed_instances_are_refuted() {
    let mut seen = 0;
    for a in 1..=3 {
        for q in [
            BiPoly::from_terms(Q, [(0, 1, qv(a)), (0, 2, qv(-a)), (1, 2, qv(1))]),
            BiPoly::from_terms(Q, [(0, 1, qv(1)), (0, 2, qv(-1)), (1, 2, qv(a))]),
        ] {
            let c = classify_almost_null(&q).unwrap();
            if let PlaneVerdict::ObstructedUpper(_) = c.verdict {
                seen += 1;
                let r = detect_obstruction(&q, 10);
                assert!(r.is_refuted(), "{q}: {r:?}");
                assert!(r.witness.unwrap().degree() <= 10);
            }
        }
    }
    assert!(seen >= 1);
}
