//! Acceptance run: one line per criterion, nonzero exit if any fails.
//! Every comparison is exact.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twistlab_core::builders::{
    build_almost_null, build_derivation_tower, build_dual_square, build_ore,
    build_truncated_derivation, square_shift_derivation, DerivSpec, EndoSpec,
};
use twistlab_core::dual::{
    classify_dual, even_column_relation, identity_endpoints, identity_lower_shift,
    identity_same_top, q_from_solution, solve_c, systems_equivalent_check, to_alpha_view,
    verify_iota_axioms, IotaPair,
};
use twistlab_core::planes::{
    classify_almost_null, detect_obstruction, shift_matrix_closed, shift_matrix_generic,
    PlaneVerdict, ShiftParams,
};
use twistlab_core::series::{build_series, build_series_tower, replay_series, verify_series};
use twistlab_core::twist::{replay, verify_axioms, AlphaFamily, Base, VerifyParams};
use twistlab_core::{binomial, BiPoly, Error, Poly, RingDescriptor, RingValue};

const Q: RingDescriptor = RingDescriptor::Rationals;

fn qv(x: i64) -> RingValue {
    RingValue::from_i64(Q, x)
}

fn bi(ring: RingDescriptor, e: &[(usize, usize, i64)]) -> BiPoly {
    BiPoly::from_terms(ring, e.iter().map(|&(i, j, c)| (i, j, RingValue::from_i64(ring, c))))
}

fn px(ring: RingDescriptor, s: &str) -> Poly {
    Poly::parse(ring, s).unwrap()
}

fn mono(fam: &AlphaFamily, k: usize) -> Poly {
    let p = Poly::monomial(RingValue::one(fam.ring()), k);
    match fam.base() {
        Base::Quot(n) => p.truncate(n),
        Base::PolyX => p,
    }
}

/// Test-side `γ_j^(r)(X^k)`: every sequence `(i_1, …, i_r)` summing to `j`,
/// applied innermost last.
fn gamma_oracle(fam: &mut AlphaFamily, j: usize, r: usize, k: usize) -> Poly {
    fn walk(fam: &mut AlphaFamily, left: usize, parts: usize, p: Poly, acc: &mut Poly) {
        if parts == 0 {
            if left == 0 {
                *acc = &*acc + &p;
            }
            return;
        }
        for i in 0..=left {
            let q = fam.apply(i, &p).unwrap();
            if !q.is_zero() {
                walk(fam, left - i, parts - 1, q, acc);
            }
        }
    }
    let mut acc = Poly::zero(fam.ring());
    let start = mono(fam, k);
    walk(fam, j, r, start, &mut acc);
    acc
}

fn weyl() -> AlphaFamily {
    let id = EndoSpec::identity(Base::PolyX, Q);
    let delta = DerivSpec::new(id.clone(), id.clone(), px(Q, "1")).unwrap();
    build_ore(&id, &delta).unwrap()
}

fn criterion_1() -> String {
    let mut fams: Vec<(String, AlphaFamily)> = vec![
        ("quantum plane".into(), AlphaFamily::from_q(Base::PolyX, &bi(Q, &[(1, 1, 3)])).unwrap()),
        ("Weyl-like Ore".into(), weyl()),
        ("dual square".into(), build_dual_square(Q)),
    ];
    for n in 3..=5 {
        fams.push((format!("truncated derivation n={n}"), build_truncated_derivation(Q, n).unwrap()));
    }
    for (name, fam) in &fams {
        let r = verify_axioms(fam, &VerifyParams::new(10));
        assert!(r.is_verified(), "{name}: {r:?}");
    }
    let mut compared = 0;
    for (name, fam) in &mut fams {
        for j in 0..=6 {
            for r in 0..=6 {
                for k in 0..=3 {
                    let want = gamma_oracle(fam, j, r, k);
                    let got = fam.gamma_mono(j, r, k).unwrap();
                    assert_eq!(got, want, "{name}: gamma_{j}^({r})(X^{k})");
                    compared += 1;
                }
            }
        }
    }
    format!("6 families verified at N=10; {compared} gamma cells match enumeration")
}

fn random_almost_null(rng: &mut ChaCha8Rng) -> BiPoly {
    let mut terms = Vec::new();
    for i in 2..=5 {
        for j in 2..=5 {
            if rng.gen_bool(0.35) {
                let c = RingValue::from_ratio(
                    Q,
                    &rng.gen_range(-4i64..=4).into(),
                    &rng.gen_range(1i64..=3).into(),
                )
                .unwrap();
                terms.push((i, j, c));
            }
        }
    }
    if terms.iter().all(|(_, _, c)| c.is_zero()) {
        terms.push((2, 2, qv(1)));
    }
    BiPoly::from_terms(Q, terms)
}

fn criterion_2() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut evals = 0;
    for case in 0..20 {
        let q = random_almost_null(&mut rng);
        let fam = build_almost_null(&q).unwrap();
        let rep = verify_axioms(&fam, &VerifyParams::new(10));
        assert!(rep.is_verified(), "case {case} {q}: {rep:?}");
        let mut f = fam.clone();
        for r in 1..10 {
            for s in 1..10 {
                if r + s > 2 && r + s <= 10 {
                    let x = Poly::monomial(qv(1), s);
                    assert!(f.eval_s(r, &x, 12).unwrap().is_zero(), "case {case}: s(Y^{r}⊗X^{s})");
                    evals += 1;
                }
            }
        }
    }
    format!("20 random matrices verified; {evals} products vanish")
}

fn criterion_3() -> String {
    // Q_2(Z) = (Z - 1)^2.
    let multiple = bi(Q, &[(0, 1, 1), (0, 2, 1), (1, 2, -2), (2, 2, 1)]);
    let c = classify_almost_null(&multiple).unwrap();
    let PlaneVerdict::AlmostNull { params, shifted } = &c.verdict else {
        panic!("expected AlmostNull, got {:?}", c.verdict)
    };
    assert!(shifted.terms().all(|(i, j, _)| i >= 2 && j >= 2), "{shifted}");
    assert!(!shifted.is_zero());
    assert!(build_almost_null(shifted).is_ok());
    let simple = bi(Q, &[(0, 1, 1), (0, 2, -1), (1, 2, 1)]);
    let c = classify_almost_null(&simple).unwrap();
    assert!(matches!(c.verdict, PlaneVerdict::ObstructedUpper(_)), "{:?}", c.verdict);
    let rep = detect_obstruction(&simple, 10);
    assert!(rep.is_refuted(), "{rep:?}");
    let d = rep.witness.as_ref().unwrap().degree();
    assert!(d <= 10);
    format!(
        "multiple root: AlmostNull via ({}, {}), shifted {}; simple root: ObstructedUpper, refuted at degree {d}",
        params.lambda, params.xi, shifted
    )
}

fn criterion_4() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..50 {
        let mut terms = Vec::new();
        for i in 0..=3 {
            for j in 0..=3 {
                if rng.gen_bool(0.3) {
                    terms.push((i, j, qv(rng.gen_range(-3..=3))));
                }
            }
        }
        let q = BiPoly::from_terms(Q, terms);
        let lambda = RingValue::from_ratio(Q, &rng.gen_range(-3i64..=3).into(), &rng.gen_range(1i64..=2).into()).unwrap();
        let xi = qv(rng.gen_range(-3..=3));
        let sp = ShiftParams::new(lambda, xi);
        let fam = AlphaFamily::from_q(Base::PolyX, &q).unwrap();
        assert_eq!(
            shift_matrix_generic(&fam, &sp).unwrap(),
            shift_matrix_closed(&q, &sp),
            "case {case}: q = {q}"
        );
    }
    "50 random instances: composition route equals closed formula".into()
}

/// Test-side `Σ_{k=0}^{N-n} (-1)^k C(n+k, n)`.
fn alt_sum(n: u64, nn: u64) -> num_bigint::BigInt {
    (0..=nn - n)
        .map(|k| {
            let b = binomial(n + k, n as i64);
            if k % 2 == 0 {
                b
            } else {
                -b
            }
        })
        .sum()
}

fn criterion_5() -> String {
    use num_bigint::BigInt;
    let sign = |e: u64| if e.is_multiple_of(2) { BigInt::from(1) } else { BigInt::from(-1) };
    let mut checks = 0;
    for nn in 0..=20u64 {
        assert!(identity_endpoints(nn), "endpoints N={nn}");
        assert_eq!(2 * alt_sum(0, nn), sign(nn) + 1);
        assert_eq!(alt_sum(nn, nn), BigInt::from(1));
        for n in 1..=nn {
            assert!(identity_lower_shift(n, nn) && identity_same_top(n, nn), "n={n} N={nn}");
            assert_eq!(2 * alt_sum(n, nn) - alt_sum(n - 1, nn - 1), sign(nn - n) * binomial(nn, n as i64));
            assert_eq!(2 * alt_sum(n, nn) - alt_sum(n - 1, nn), sign(nn - n) * binomial(nn + 1, n as i64));
            checks += 1;
        }
    }
    for m in 1..=10 {
        for i in 0..=m {
            for n in 1..=m.max(2) / 2 {
                assert!(even_column_relation(i, n), "i={i} n={n}");
                checks += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut both_hold = 0;
    for _ in 0..200 {
        let m = rng.gen_range(1..=8usize);
        let y: Vec<RingValue> = if m % 2 == 0 && rng.gen_bool(0.5) {
            let sol = solve_c(m).unwrap();
            let mut y = vec![BigRational::from_integer(0.into()); m + 1];
            for b in &sol.basis {
                let k = BigRational::from_integer(rng.gen_range(-4i64..=4).into());
                for (yi, bi) in y.iter_mut().zip(b) {
                    *yi += &k * bi;
                }
            }
            y.iter().map(|v| RingValue::from_rational(Q, v).unwrap()).collect()
        } else {
            (0..=m).map(|_| qv(rng.gen_range(-2..=2))).collect()
        };
        let (a, b) = systems_equivalent_check(&y);
        assert_eq!(a, b, "{y:?}");
        both_hold += usize::from(a);
        checks += 1;
    }
    assert!(both_hold >= 40, "too few solutions sampled: {both_hold}");
    format!("{checks} identity checks, {both_hold} of 200 sampled vectors solve both systems")
}

fn random_dual_pair(rng: &mut ChaCha8Rng) -> (Poly, Poly) {
    let rand_poly = |rng: &mut ChaCha8Rng, deg: usize| {
        Poly::from_terms(Q, (0..=deg).map(|i| (i, qv(rng.gen_range(-2..=2)))))
    };
    let (p, mut q) = match rng.gen_range(0..4) {
        0 => {
            let d = rng.gen_range(0..=4);
            (rand_poly(rng, d), Poly::zero(Q))
        }
        1 => {
            let q = Poly::from_terms(Q, (0..=4).map(|i| (2 * i, qv(rng.gen_range(-2..=2)))));
            (px(Q, "-Y"), q)
        }
        2 => {
            let m = 2 * rng.gen_range(1..=4);
            let sol = solve_c(m).unwrap();
            let mut y = vec![BigRational::from_integer(0.into()); m + 1];
            for b in &sol.basis {
                let k = BigRational::from_integer(rng.gen_range(-3i64..=3).into());
                for (yi, bi) in y.iter_mut().zip(b) {
                    *yi += &k * bi;
                }
            }
            let p0 = BigRational::from_integer(rng.gen_range(1i64..=3).into());
            let q = q_from_solution(&y, &p0).unwrap();
            let p = &px(Q, "-Y") + &Poly::constant(RingValue::from_rational(Q, &p0).unwrap());
            (p, q)
        }
        _ => {
            let d = rng.gen_range(1..=3);
            let e = rng.gen_range(0..=8);
            (rand_poly(rng, d), rand_poly(rng, e))
        }
    };
    if rng.gen_bool(0.2) {
        let i = rng.gen_range(0..=8);
        q.add_term(i, &qv(1));
    }
    (p, q)
}

fn criterion_6() -> String {
    for m in [2, 4, 6, 8, 10] {
        let s = solve_c(m).unwrap();
        assert_eq!(s.rank, m / 2, "rank m={m}");
        assert_eq!(s.nullity(), m / 2 + 1, "nullity m={m}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut valid, mut views) = (0, 0);
    for case in 0..200 {
        let (p, q) = random_dual_pair(&mut rng);
        assert!(q.degree().finite().unwrap_or(0) <= 8);
        let verdict = classify_dual(&p, &q);
        let rep = verify_iota_axioms(&IotaPair::new(p.clone(), q.clone()).unwrap(), 10);
        assert_eq!(verdict.is_valid(), rep.is_verified(), "case {case}: P={p} Q={q} {verdict:?} {rep:?}");
        if verdict.is_valid() {
            valid += 1;
            let fam = to_alpha_view(&p, &q).unwrap();
            let r = verify_axioms(&fam, &VerifyParams::new(10));
            assert!(r.is_verified(), "alpha view of P={p} Q={q}: {r:?}");
            views += 1;
        }
    }
    assert!((50..=190).contains(&valid), "unbalanced sweep: {valid} valid");
    format!("rank m/2 for m in 2..10; 200 pairs agree ({valid} valid), {views} alpha views verified")
}

/// Test-side containment: the coefficient of `X^r` in `α_j(X^n)` lies in
/// `2^{n-j-r+1}` modulo `2^k`.
fn containment_by_hand(modulus: i64, fam: &twistlab_core::series::TruncatedAlphaFamily) {
    let (nx, ny) = fam.orders();
    for j in 1..ny {
        for n in j..nx {
            let cell = fam.cell(j, n).unwrap();
            for r in 0..=n - j {
                let c = cell.coeff(r).to_i64().unwrap();
                let e = (n - j - r + 1) as u32;
                let g = 2i64.checked_pow(e).unwrap_or(i64::MAX).min(modulus);
                assert_eq!(c % g, 0, "alpha_{j}(X^{n}) coefficient of X^{r} = {c}");
            }
        }
    }
}

fn criterion_7() -> String {
    let mut lines = Vec::new();
    for (modulus, a) in [
        (4u64, vec![(0, 1, 2), (1, 1, 1), (2, 1, 1), (1, 2, 1)]),
        (8u64, vec![(0, 1, 2), (1, 1, 1), (0, 2, 4), (2, 2, 1)]),
    ] {
        let ring = RingDescriptor::mod_n(modulus).unwrap();
        let a = bi(ring, &a);
        let coarse = build_series(&a, 8, 8).unwrap();
        let rep = verify_series(&coarse, 8, 8);
        assert!(rep.is_verified(), "Z/{modulus}: {rep:?}");
        assert!(coarse.check_containment().is_none());
        containment_by_hand(modulus as i64, &coarse);
        let fine = build_series(&a, 12, 12).unwrap();
        containment_by_hand(modulus as i64, &fine);
        let restricted: BTreeMap<_, _> = fine
            .table()
            .into_iter()
            .filter(|((j, n), _)| *j < 8 && *n < 8)
            .map(|(k, p)| (k, p.truncate(8)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        assert_eq!(restricted, coarse.table(), "refinement over Z/{modulus}");
        lines.push(format!("Z/{modulus} (index {})", coarse.nilpotency_index()));
    }
    let err = build_series(&bi(Q, &[(0, 1, 1), (1, 1, 1)]), 8, 8).unwrap_err();
    assert!(matches!(err, Error::NonNilpotentConstant(_)), "{err:?}");
    format!("{} verified at (8,8), containment and refinement hold; Q with a_01 = 1 rejected", lines.join(", "))
}

fn criterion_8() -> String {
    let mut cells = 0;
    for n in 3..=6 {
        let base = Base::Quot(n);
        let id = EndoSpec::identity(base, Q);
        let betas: BTreeMap<usize, DerivSpec> = [(1, square_shift_derivation(Q, n).unwrap())].into();
        let direct: BTreeMap<_, _> = build_truncated_derivation(Q, n).unwrap().stored_cells().into_iter().collect();
        let (tower, _) = build_derivation_tower(&id, &betas, n + 2, 8).unwrap();
        let tower: BTreeMap<_, _> = tower.stored_cells().into_iter().collect();
        let ny = n + 2;
        let series = build_series_tower(&id, &betas, ny, 8).unwrap().table();
        let common = |t: &BTreeMap<(usize, usize), Poly>| -> BTreeMap<(usize, usize), Poly> {
            t.iter().filter(|((j, _), _)| *j < ny).map(|(k, p)| (*k, p.clone())).collect()
        };
        assert_eq!(common(&direct), common(&tower), "direct vs tower, n={n}");
        assert_eq!(common(&direct), series, "direct vs series, n={n}");
        cells += series.len();
    }
    format!("n = 3..6: three constructions agree on {cells} nonzero cells")
}

fn criterion_9() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut kinds = BTreeMap::new();
    for case in 0..20 {
        let delta = |rng: &mut ChaCha8Rng, ring: RingDescriptor, top: usize| {
            let d = rng.gen_range(0..top);
            let mut c = RingValue::from_i64(ring, rng.gen_range(1..=3));
            if c.is_zero() {
                c = RingValue::one(ring);
            }
            Poly::monomial(c, d)
        };
        match case % 4 {
            0 | 1 => {
                let (name, mut fam, m_lo) = match rng.gen_range(0..4) {
                    0 => ("quantum plane", AlphaFamily::from_q(Base::PolyX, &bi(Q, &[(1, 1, 2)])).unwrap(), 2),
                    1 => ("almost null", build_almost_null(&random_almost_null(&mut rng)).unwrap(), 2),
                    2 => ("truncated derivation", build_truncated_derivation(Q, 5).unwrap(), 2),
                    _ => ("dual square", build_dual_square(Q), 0),
                };
                let (m, j) = if m_lo == 0 { (0, rng.gen_range(0..=2)) } else { (rng.gen_range(2..=4), rng.gen_range(1..=3)) };
                let top = match fam.base() {
                    Base::Quot(n) => n,
                    Base::PolyX => 6,
                };
                let old = fam.cell(j, m).unwrap();
                let bumped = &old + &delta(&mut rng, Q, top);
                fam.set_cell(j, m, bumped);
                let params = VerifyParams::new(10);
                let rep = verify_axioms(&fam, &params);
                assert!(rep.is_refuted(), "case {case} {name} cell ({j},{m}): {rep:?}");
                let w = rep.witness.unwrap();
                assert!(replay(&fam, &w, &params).unwrap(), "case {case}: replay of {}", w.describe());
                *kinds.entry(name).or_insert(0) += 1;
            }
            _ => {
                let modulus = if rng.gen_bool(0.5) { 4 } else { 8 };
                let ring = RingDescriptor::mod_n(modulus).unwrap();
                let mut fam = build_series(&bi(ring, &[(0, 1, 2), (1, 1, 1), (1, 2, 1)]), 8, 8).unwrap();
                let (j, n) = (rng.gen_range(1..8), rng.gen_range(0..8));
                let old = fam.cell(j, n).unwrap();
                fam.set_cell(j, n, &old + &delta(&mut rng, ring, 8));
                let rep = verify_series(&fam, 8, 8);
                assert!(rep.is_refuted(), "case {case} series cell ({j},{n}): {rep:?}");
                let w = rep.witness.unwrap();
                assert!(replay_series(&fam, &w).unwrap(), "case {case}: replay of {}", w.describe());
                *kinds.entry("series").or_insert(0) += 1;
            }
        }
    }
    format!("20 single-cell mutations refuted and replayed: {kinds:?}")
}

type Criterion = (&'static str, fn() -> String);

fn main() {
    let criteria: [Criterion; 9] = [
        ("extension engine", criterion_1),
        ("almost-null construction", criterion_2),
        ("root conditions on the plane", criterion_3),
        ("shift equivalence", criterion_4),
        ("binomial identities", criterion_5),
        ("dual-number classification", criterion_6),
        ("series construction", criterion_7),
        ("truncated derivation three ways", criterion_8),
        ("mutation honesty", criterion_9),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {} PASS [{name}] ({secs:.1}s): {detail}", k + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {} FAIL [{name}] ({secs:.1}s): {msg}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria pass");
}
