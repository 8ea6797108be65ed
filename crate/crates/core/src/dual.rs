//! Twisting maps between the dual numbers `k[t]/(t^2)` and `k[Y]`, given by
//! `s(t⊗a) = ι_0(a)⊗1 + ι_1(a)⊗t` with `ι_1(Y) = P` and `ι_0(Y) = Q`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{nullspace, rref, Matrix};
use crate::poly::Poly;
use crate::ring::{binomial, binomial_in, sign_pow, RingValue};
use crate::twist::{AlphaFamily, Base, Status, VerificationReport, Witness};

/// `A_n^N = Σ_{k=0}^{N-n} (-1)^k C(n+k, n)`.
pub fn alternating_binomial_sum(n: u64, big_n: u64) -> Result<BigInt> {
    if n > big_n {
        return Err(Error::Invalid(format!(
            "alternating sum needs n <= N, got n = {n}, N = {big_n}"
        )));
    }
    Ok((0..=big_n - n)
        .map(|k| binomial(n + k, n as i64) * sign_pow(k))
        .sum())
}

fn a_sum(n: u64, big_n: u64) -> BigInt {
    alternating_binomial_sum(n, big_n).expect("indices checked by caller")
}

/// `2A_n^N − A_{n-1}^{N-1} = (-1)^{N-n} C(N, n)` for `1 ≤ n ≤ N`.
pub fn identity_lower_shift(n: u64, big_n: u64) -> bool {
    2 * a_sum(n, big_n) - a_sum(n - 1, big_n - 1) == binomial(big_n, n as i64) * sign_pow(big_n - n)
}

/// `2A_n^N − A_{n-1}^N = (-1)^{N-n} C(N+1, n)` for `1 ≤ n ≤ N`.
pub fn identity_same_top(n: u64, big_n: u64) -> bool {
    2 * a_sum(n, big_n) - a_sum(n - 1, big_n)
        == binomial(big_n + 1, n as i64) * sign_pow(big_n - n)
}

/// `2A_0^N = (-1)^N + 1` and `A_N^N = 1`.
pub fn identity_endpoints(big_n: u64) -> bool {
    2 * a_sum(0, big_n) == BigInt::from(sign_pow(big_n) + 1) && a_sum(big_n, big_n).is_one()
}

/// Evaluates both linear systems on `y = (y_0, …, y_m)`:
/// `Σ_{i=h}^{m-1} y_{i+1} A_{i-h}^i = 0` for `h < m`, and
/// `Σ_{i=h}^m C(i,h) y_i = (-1)^h y_h` for `h ≤ m`.
pub fn systems_equivalent_check(y: &[RingValue]) -> (bool, bool) {
    let Some(first) = y.first() else {
        return (true, true);
    };
    let ring = first.ring();
    let m = y.len() - 1;
    let a_ok = (0..m).all(|h| {
        (h..m)
            .fold(RingValue::zero(ring), |acc, i| {
                let a = RingValue::from_bigint(ring, &a_sum((i - h) as u64, i as u64));
                &acc + &(&y[i + 1] * &a)
            })
            .is_zero()
    });
    let b_ok = (0..=m).all(|h| b_row(y, h).is_zero());
    (a_ok, b_ok)
}

/// `B(h) = Σ_{i=h}^m C(i,h) y_i − (-1)^h y_h`.
fn b_row(y: &[RingValue], h: usize) -> RingValue {
    let ring = y[0].ring();
    let mut acc = RingValue::zero(ring);
    for (i, yi) in y.iter().enumerate().skip(h) {
        acc = &acc + &(yi * &binomial_in(ring, i as u64, h as i64));
    }
    &acc - &y[h].scale_int(&BigInt::from(sign_pow(h as u64)))
}

/// The pair `ι_1(Y) = P`, `ι_0(Y) = Q` extended to `k[Y]`: `ι_1` as an algebra
/// map and `ι_0` as an `ι_1`-derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IotaPair {
    p: Poly,
    q: Poly,
}

impl IotaPair {
    pub fn new(p: Poly, q: Poly) -> Result<Self> {
        if p.ring() != q.ring() {
            return Err(Error::RingMismatch {
                left: p.ring(),
                right: q.ring(),
            });
        }
        Ok(IotaPair { p, q })
    }

    pub fn p(&self) -> &Poly {
        &self.p
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    /// `ι_1(Y^l) = P^l`, with `P^0 = 1` even when `P = 0`.
    pub fn iota1_mono(&self, l: usize) -> Poly {
        self.p.pow(l as u32)
    }

    /// `ι_0(Y^l) = Q Σ_{i<l} P^i Y^{l-i-1}`.
    pub fn iota0_mono(&self, l: usize) -> Poly {
        let ring = self.p.ring();
        let mut sum = Poly::zero(ring);
        let mut pi = Poly::one(ring);
        for i in 0..l {
            sum = &sum + &(&pi * &Poly::monomial(RingValue::one(ring), l - i - 1));
            pi = &pi * &self.p;
        }
        &self.q * &sum
    }

    pub fn iota1(&self, a: &Poly) -> Poly {
        a.compose(&self.p)
    }

    pub fn iota0(&self, a: &Poly) -> Poly {
        let mut out = Poly::zero(a.ring());
        for (l, c) in a.terms() {
            out.add_scaled(&self.iota0_mono(l), c);
        }
        out
    }
}

fn iota_witness(check: &str, l: usize, lhs: Poly, rhs: Poly) -> Witness {
    Witness::Iota {
        check: check.into(),
        l,
        lhs,
        rhs,
    }
}

/// `P^k` and `ι_0(Y^k)` for `k < len`, the latter by
/// `ι_0(Y^{k+1}) = ι_0(Y^k)·Y + P^k·Q`.
struct IotaTables {
    pw: Vec<Poly>,
    io0: Vec<Poly>,
}

impl IotaTables {
    fn new(pair: &IotaPair, len: usize) -> Self {
        let ring = pair.p.ring();
        let mut pw = vec![Poly::one(ring)];
        let mut io0 = vec![Poly::zero(ring)];
        for k in 0..len {
            io0.push(&io0[k].shift_degree(1) + &(&pw[k] * &pair.q));
            pw.push(&pw[k] * &pair.p);
        }
        IotaTables { pw, io0 }
    }

    fn combine(table: &[Poly], a: &Poly) -> Poly {
        let mut out = Poly::zero(a.ring());
        for (k, c) in a.terms() {
            out.add_scaled(&table[k], c);
        }
        out
    }

    fn iota1(&self, a: &Poly) -> Poly {
        Self::combine(&self.pw, a)
    }

    fn iota0(&self, a: &Poly) -> Poly {
        Self::combine(&self.io0, a)
    }
}

/// Checks the dual-number twisting conditions on `Y^l` for `l ≤ n`:
/// `ι_1` multiplicative, `ι_0(ab) = ι_0(a)b + ι_1(a)ι_0(b)`, `ι_0^2 = 0`
/// and `ι_0∘ι_1 = −ι_1∘ι_0`.
pub fn verify_iota_axioms(pair: &IotaPair, n: usize) -> VerificationReport {
    let ring = pair.p.ring();
    let dp = pair.p.degree().finite().unwrap_or(0).max(1);
    let dq = pair.q.degree().finite().unwrap_or(0);
    let t = IotaTables::new(pair, n * dp + dq + n + 2);
    let mut checks = 0;
    let mut fail = None;
    'outer: for l in 0..=n {
        for a in 0..=l {
            let b = l - a;
            checks += 2;
            let lhs = t.pw[l].clone();
            let rhs = &t.pw[a] * &t.pw[b];
            if lhs != rhs {
                fail = Some(iota_witness("iota_1 multiplicative", l, lhs, rhs));
                break 'outer;
            }
            let lhs = t.io0[l].clone();
            let rhs = &t.io0[a].shift_degree(b) + &(&t.pw[a] * &t.io0[b]);
            if lhs != rhs {
                fail = Some(iota_witness("iota_0 Leibniz", l, lhs, rhs));
                break 'outer;
            }
        }
        checks += 2;
        let sq = t.iota0(&t.io0[l]);
        if !sq.is_zero() {
            fail = Some(iota_witness("iota_0^2 = 0", l, sq, Poly::zero(ring)));
            break;
        }
        let lhs = t.iota0(&t.pw[l]);
        let rhs = -&t.iota1(&t.io0[l]);
        if lhs != rhs {
            fail = Some(iota_witness("iota_0 iota_1 = -iota_1 iota_0", l, lhs, rhs));
            break;
        }
    }
    VerificationReport {
        degree_bound: n,
        status: if fail.is_some() {
            Status::Refuted
        } else {
            Status::Verified
        },
        witness: fail,
        y_truncation: None,
        hypothesis: None,
        checks,
        note: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualBranch {
    /// `Q = 0`, `P` arbitrary.
    ZeroQ,
    /// `P = −Y`, `Q` even.
    EvenQ,
    /// `P = −Y + p_0`, `p_0 ≠ 0`, with the binomial conditions on `Q`.
    Shifted { p0: RingValue, m_even: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualVerdict {
    Valid(DualBranch),
    Invalid(String),
}

impl DualVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, DualVerdict::Valid(_))
    }
}

/// Decides whether `(P, Q)` defines a twisting map, from the closed-form
/// conditions on the coefficients.
pub fn classify_dual(p: &Poly, q: &Poly) -> DualVerdict {
    let ring = p.ring();
    if q.is_zero() {
        return DualVerdict::Valid(DualBranch::ZeroQ);
    }
    let shape = p.degree().finite() == Some(1) && p.coeff(1) == RingValue::from_i64(ring, -1);
    if !shape {
        return DualVerdict::Invalid(format!("P = {} is not of the form -Y + p_0", p.display_with("Y")));
    }
    let p0 = p.coeff(0);
    let m = q.degree().finite().unwrap_or(0);
    if p0.is_zero() {
        if let Some((i, c)) = q.terms().find(|(i, _)| i % 2 == 1) {
            return DualVerdict::Invalid(format!("p_0 = 0 but q_{i} = {c} with i odd"));
        }
        return DualVerdict::Valid(DualBranch::EvenQ);
    }
    for i in 0..=m {
        let mut lhs = RingValue::zero(ring);
        for j in i..=m {
            lhs = &lhs + &(&(&binomial_in(ring, j as u64, i as i64) * &q.coeff(j)) * &p0.pow((j - i) as u64));
        }
        let rhs = q.coeff(i).scale_int(&BigInt::from(sign_pow(i as u64)));
        if lhs != rhs {
            return DualVerdict::Invalid(format!(
                "sum_j C(j,{i}) q_j p_0^(j-{i}) = {lhs} but (-1)^{i} q_{i} = {rhs}"
            ));
        }
    }
    DualVerdict::Valid(DualBranch::Shifted {
        p0,
        m_even: m.is_multiple_of(2),
    })
}

/// The `(m+1)×(m+1)` matrix with `c_ij = C(j,i) − (-1)^i δ_ij`, so that row
/// `i` of `C·y` is `B(i)`.
#[derive(Clone, Debug)]
pub struct ClassificationMatrix {
    pub m: usize,
    pub matrix: Matrix,
}

/// `c_ij` from the closed formula; also valid past column `m`.
pub fn c_entry(i: usize, j: usize) -> BigInt {
    let d = if i == j { sign_pow(i as u64) } else { 0 };
    binomial(j as u64, i as i64) - d
}

pub fn build_c_matrix(m: usize) -> Result<ClassificationMatrix> {
    if m == 0 || m % 2 == 1 {
        return Err(Error::Invalid(format!(
            "the classification matrix needs m even and positive, got {m}"
        )));
    }
    let mut matrix = Matrix::zeros(m + 1, m + 1);
    for i in 0..=m {
        for j in 0..=m {
            matrix.set(i, j, BigRational::from_integer(c_entry(i, j)));
        }
    }
    Ok(ClassificationMatrix { m, matrix })
}

#[derive(Clone, Debug)]
pub struct CSolution {
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// One vector `y` per free column, with that entry set to 1.
    pub basis: Vec<Vec<BigRational>>,
}

impl CSolution {
    pub fn nullity(&self) -> usize {
        self.basis.len()
    }
}

pub fn solve_c(m: usize) -> Result<CSolution> {
    let c = build_c_matrix(m)?;
    let e = rref(&c.matrix);
    Ok(CSolution {
        rank: e.rank(),
        pivots: e.pivots.clone(),
        basis: nullspace(&c.matrix),
    })
}

/// `Σ_{k=0}^n (-1)^k c_{i,2n-k} C(n,k) = 0`.
pub fn even_column_relation(i: usize, n: usize) -> bool {
    (0..=n)
        .map(|k| c_entry(i, 2 * n - k) * binomial(n as u64, k as i64) * sign_pow(k as u64))
        .sum::<BigInt>()
        .is_zero()
}

/// Turns `y_i = q_i p_0^i` back into `Q = Σ q_i Y^i`.
pub fn q_from_solution(y: &[BigRational], p0: &BigRational) -> Result<Poly> {
    if p0.is_zero() {
        return Err(Error::Invalid("p_0 must be nonzero".into()));
    }
    let ring = crate::ring::RingDescriptor::Rationals;
    let mut terms = Vec::new();
    let mut pw = BigRational::one();
    for (i, yi) in y.iter().enumerate() {
        terms.push((i, RingValue::from_rational(ring, &(yi / &pw))?));
        pw = &pw * p0;
    }
    Ok(Poly::from_terms(ring, terms))
}

/// The flipped family on `k[t]/(t^2)`: `τ∘s∘τ(Y⊗t) = 1⊗Q + t⊗P`, so
/// `α_j(t) = q_j + p_j t`.
pub fn to_alpha_view(p: &Poly, q: &Poly) -> Result<AlphaFamily> {
    if let DualVerdict::Invalid(why) = classify_dual(p, q) {
        return Err(Error::Invalid(why));
    }
    let ring = p.ring();
    let t = Poly::var(ring);
    let top = p.degree().finite().unwrap_or(0).max(q.degree().finite().unwrap_or(0));
    let mut tables = BTreeMap::new();
    for j in 0..=top {
        let cell = &Poly::constant(q.coeff(j)) + &t.scalar_mul(&p.coeff(j));
        tables.insert((j, 1), cell);
    }
    let mut fam = AlphaFamily::from_tables(ring, Base::Quot(2), &tables)?.with_y_limit(top.max(1));
    fam.note(format!(
        "dual-number view of P = {}, Q = {}",
        p.display_with("Y"),
        q.display_with("Y")
    ));
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingDescriptor;
    use crate::twist::{verify_axioms, VerifyParams};

    const Q: RingDescriptor = RingDescriptor::Rationals;

    fn y(s: &str) -> Poly {
        Poly::parse(Q, s).unwrap()
    }

    fn pair(p: &str, q: &str) -> IotaPair {
        IotaPair::new(y(p), y(q)).unwrap()
    }

    #[test]
    fn alternating_sums() {
        assert_eq!(alternating_binomial_sum(5, 5).unwrap(), BigInt::one());
        assert_eq!(alternating_binomial_sum(0, 3).unwrap(), BigInt::zero());
        assert_eq!(alternating_binomial_sum(2, 5).unwrap(), BigInt::from(-6));
        assert_eq!(
            2 * alternating_binomial_sum(2, 5).unwrap() - alternating_binomial_sum(1, 4).unwrap(),
            BigInt::from(-10)
        );
        assert!(alternating_binomial_sum(3, 2).is_err());
    }

    #[test]
    fn iota_extension() {
        let pr = pair("-Y", "1 + Y^2");
        assert_eq!(pr.iota0_mono(0), Poly::zero(Q));
        assert_eq!(pr.iota0_mono(1), y("1 + Y^2"));
        // Q(Y + P) = 0 for P = -Y.
        assert_eq!(pr.iota0_mono(2), Poly::zero(Q));
        let zero_p = pair("0", "1");
        assert_eq!(zero_p.iota1_mono(0), Poly::one(Q));
        assert_eq!(zero_p.iota0_mono(3), y("Y^2"));
    }

    #[test]
    fn iota_axioms() {
        assert!(verify_iota_axioms(&pair("Y^3 - 2Y + 5", "0"), 8).is_verified());
        assert!(verify_iota_axioms(&pair("-Y", "1 + Y^2"), 8).is_verified());
        let r = verify_iota_axioms(&pair("-Y", "Y"), 8);
        assert!(r.is_refuted());
        assert!(matches!(r.witness, Some(Witness::Iota { l: 1, .. })));
    }

    #[test]
    fn classification() {
        assert_eq!(classify_dual(&y("Y^2"), &y("0")), DualVerdict::Valid(DualBranch::ZeroQ));
        assert!(classify_dual(&y("-Y + 1"), &y("3 - 2Y + 2Y^2")).is_valid());
        assert!(!classify_dual(&y("-Y + 1"), &y("3 - 2Y + Y^2")).is_valid());
        assert!(!classify_dual(&y("Y"), &y("Y^2")).is_valid());
        assert!(!classify_dual(&y("-Y"), &y("Y")).is_valid());
    }

    #[test]
    fn classification_matrix() {
        assert_eq!(build_c_matrix(2).unwrap().matrix.rows(), 3);
        let rows: Vec<Vec<i64>> = (0..3)
            .map(|i| (0..3).map(|j| c_entry(i, j).try_into().unwrap()).collect())
            .collect();
        assert_eq!(rows, vec![vec![0, 1, 1], vec![0, 2, 2], vec![0, 0, 0]]);
        let s = solve_c(2).unwrap();
        assert_eq!((s.rank, s.nullity()), (1, 2));
        let r = BigRational::from_integer;
        assert_eq!(s.basis[0], vec![r(1.into()), r(0.into()), r(0.into())]);
        assert_eq!(s.basis[1], vec![r(0.into()), r((-1).into()), r(1.into())]);
        let s4 = solve_c(4).unwrap();
        assert_eq!((s4.rank, s4.nullity()), (2, 3));
        assert_eq!(s4.pivots, vec![1, 3]);
        assert!(build_c_matrix(3).is_err());
    }

    #[test]
    fn alpha_view_uses_direct_sign() {
        let fam = to_alpha_view(&y("-Y"), &y("1 + Y^2")).unwrap();
        assert_eq!(fam.stored_cell(0, 1), Some(&Poly::one(Q)));
        assert_eq!(fam.stored_cell(1, 1), Some(&y("-t")));
        assert_eq!(fam.stored_cell(2, 1), Some(&Poly::one(Q)));
        assert!(verify_axioms(&fam, &VerifyParams::new(10)).is_verified());
        // The opposite sign on the α_1 cell breaks the axioms.
        let mut flipped = fam.clone();
        flipped.set_cell(1, 1, y("t"));
        assert!(verify_axioms(&flipped, &VerifyParams::new(10)).is_refuted());
    }

    #[test]
    fn alpha_view_zero_q() {
        let fam = to_alpha_view(&y("Y + Y^2"), &y("0")).unwrap();
        assert_eq!(fam.stored_cells(), crate::builders::build_dual_square(Q).stored_cells());
        let sq = to_alpha_view(&y("Y^2"), &y("0")).unwrap();
        assert_eq!(sq.stored_cell(1, 1), None);
        assert_eq!(sq.stored_cell(2, 1), Some(&y("t")));
        assert!(verify_axioms(&sq, &VerifyParams::new(10)).is_verified());
    }

    #[test]
    fn tables_match_closed_forms() {
        let pair = pair("2 - Y + Y^3", "1 + Y^2");
        let t = IotaTables::new(&pair, 9);
        for l in 0..9 {
            assert_eq!(t.pw[l], pair.iota1_mono(l));
            assert_eq!(t.io0[l], pair.iota0_mono(l));
        }
        let a = y("3Y^4 - Y + 5");
        assert_eq!(t.iota0(&a), pair.iota0(&a));
        assert_eq!(t.iota1(&a), pair.iota1(&a));
    }
}
