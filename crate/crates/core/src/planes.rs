//! Twisted planes `k[Y]⊗k[X] → k[X]⊗k[Y]`: shifts of the defining matrix,
//! the root conditions for being shift equivalent to an almost null map,
//! and a finite search for bounded-map obstructions.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::poly::{BiPoly, Poly};
use crate::ring::{binomial_in, RingValue};
use crate::twist::{verify_axioms, AlphaFamily, Base, Status, VerificationReport, VerifyParams};

/// Shift `X ↦ X − λ`, `Y ↦ Y − ξ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftParams {
    pub lambda: RingValue,
    pub xi: RingValue,
}

impl ShiftParams {
    pub fn new(lambda: RingValue, xi: RingValue) -> Self {
        ShiftParams { lambda, xi }
    }

    pub fn negated(&self) -> Self {
        ShiftParams::new(-&self.lambda, -&self.xi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub name: String,
    pub holds: bool,
    /// The value found on the left-hand side.
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionBreakdown {
    pub holds: bool,
    pub clauses: Vec<Clause>,
    /// Set when the ring is not a domain, where the conditions are only indicative.
    pub advisory: bool,
}

impl ConditionBreakdown {
    pub fn first_failure(&self) -> Option<&Clause> {
        self.clauses.iter().find(|c| !c.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootConditionVerdict {
    pub params: ShiftParams,
    pub condition_a: ConditionBreakdown,
    pub condition_b: ConditionBreakdown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaneVerdict {
    /// Shift equivalent to a map whose matrix vanishes on rows and columns 0, 1.
    AlmostNull { params: ShiftParams, shifted: BiPoly },
    /// No upper bounded twisting map has this matrix.
    ObstructedUpper(ShiftParams),
    /// No lower bounded twisting map has this matrix.
    ObstructedLower(ShiftParams),
    Unknown,
}

impl PlaneVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            PlaneVerdict::AlmostNull { .. } => "AlmostNull",
            PlaneVerdict::ObstructedUpper(_) => "ObstructedUpper",
            PlaneVerdict::ObstructedLower(_) => "ObstructedLower",
            PlaneVerdict::Unknown => "Unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneClassification {
    pub verdict: PlaneVerdict,
    /// Every candidate pair that was evaluated, in search order.
    pub candidates: Vec<RootConditionVerdict>,
}

/// Row polynomials `P_i(Z) = Σ_n q_in Z^n` and column polynomials
/// `Q_j(Z) = Σ_m q_mj Z^m`, indexed up to the largest row and column.
pub fn row_col_polys(q: &BiPoly) -> (Vec<Poly>, Vec<Poly>) {
    let ring = q.ring();
    let rows = q.terms().map(|(i, _, _)| i + 1).max().unwrap_or(0);
    let cols = q.terms().map(|(_, j, _)| j + 1).max().unwrap_or(0);
    let mut p = vec![Poly::zero(ring); rows];
    let mut qq = vec![Poly::zero(ring); cols];
    for (i, j, c) in q.terms() {
        p[i].add_term(j, c);
        qq[j].add_term(i, c);
    }
    (p, qq)
}

fn get(v: &[Poly], i: usize, ring: crate::ring::RingDescriptor) -> Poly {
    v.get(i).cloned().unwrap_or_else(|| Poly::zero(ring))
}

/// The clauses for one side. `polys` are the `P_i` (or `Q_j`), `root` is `ξ`
/// (or `λ`) and `partner` is `λ` (or `ξ`).
fn conditions(polys: &[Poly], name: &str, root: &RingValue, partner: &RingValue, ring_ok: bool) -> ConditionBreakdown {
    let ring = root.ring();
    let (z, w) = if name == "P" { ("xi", "lambda") } else { ("lambda", "xi") };
    let mut clauses = Vec::new();
    let mut push = |name: String, lhs: RingValue, rhs: &RingValue| {
        clauses.push(Clause {
            holds: lhs == *rhs,
            value: lhs.to_string(),
            name,
        });
    };
    let zero = RingValue::zero(ring);
    let p0 = get(polys, 0, ring);
    let p1 = get(polys, 1, ring);
    push(format!("{name}_0({z}) = 0"), p0.eval(root), &zero);
    push(format!("{name}_1({z}) = {z}"), p1.eval(root), root);
    push(format!("{name}'_0({z}) = {w}"), p0.formal_derivative().eval(root), partner);
    push(format!("{name}'_1({z}) = 0"), p1.formal_derivative().eval(root), &zero);
    for (i, p) in polys.iter().enumerate().skip(2) {
        if p.is_zero() {
            continue;
        }
        push(format!("{name}_{i}({z}) = 0"), p.eval(root), &zero);
        push(format!("{name}'_{i}({z}) = 0"), p.formal_derivative().eval(root), &zero);
    }
    ConditionBreakdown {
        holds: clauses.iter().all(|c| c.holds),
        clauses,
        advisory: !ring_ok,
    }
}

/// Clauses of the row condition at `(λ, ξ)`: `P_0(ξ) = 0`, `P_1(ξ) = ξ`,
/// `P'_0(ξ) = λ`, `P'_1(ξ) = 0`, and `ξ` a multiple root of every `P_i`, `i > 1`.
pub fn check_condition_a(q: &BiPoly, params: &ShiftParams) -> ConditionBreakdown {
    let (p, _) = row_col_polys(q);
    conditions(&p, "P", &params.xi, &params.lambda, q.ring().is_domain())
}

/// The column mirror of [`check_condition_a`] with the roles of `λ` and `ξ` swapped.
pub fn check_condition_b(q: &BiPoly, params: &ShiftParams) -> ConditionBreakdown {
    let (_, qq) = row_col_polys(q);
    conditions(&qq, "Q", &params.lambda, &params.xi, q.ring().is_domain())
}

pub fn evaluate_conditions(q: &BiPoly, params: &ShiftParams) -> RootConditionVerdict {
    RootConditionVerdict {
        params: params.clone(),
        condition_a: check_condition_a(q, params),
        condition_b: check_condition_b(q, params),
    }
}

/// `Σ c (X+λ)^i (Y+ξ)^j` over the terms of `b`.
pub fn substitute_shift(b: &BiPoly, lambda: &RingValue, xi: &RingValue) -> BiPoly {
    let ring = b.ring();
    let mut out = BiPoly::zero(ring);
    for (i, j, c) in b.terms() {
        for a in 0..=i {
            let ca = &binomial_in(ring, i as u64, a as i64) * &lambda.pow((i - a) as u64);
            for e in 0..=j {
                let ce = &binomial_in(ring, j as u64, e as i64) * &xi.pow((j - e) as u64);
                out.add_term(a, e, &(c * &(&ca * &ce)));
            }
        }
    }
    out
}

/// The shifted matrix from the binomial expansion
/// `q_ij = Σ C(m,i) C(n,j) λ^{m-i} ξ^{n-j} q'_mn − [X ξ + λ Y + λ ξ]`.
pub fn shift_matrix_closed(q: &BiPoly, params: &ShiftParams) -> BiPoly {
    let ring = q.ring();
    let (l, x) = (&params.lambda, &params.xi);
    let mut out = BiPoly::zero(ring);
    for (m, n, c) in q.terms() {
        for i in 0..=m {
            for j in 0..=n {
                let coef = &(&binomial_in(ring, m as u64, i as i64)
                    * &binomial_in(ring, n as u64, j as i64))
                    * &(&l.pow((m - i) as u64) * &x.pow((n - j) as u64));
                out.add_term(i, j, &(&coef * c));
            }
        }
    }
    out.add_term(1, 0, &-x);
    out.add_term(0, 1, &-l);
    out.add_term(0, 0, &-(l * x));
    out
}

/// The shifted matrix by composing maps: `s'` is evaluated on
/// `(Y − ξ)⊗(X − λ)` through its α-family, then `X ↦ X + λ`, `Y ↦ Y + ξ`.
pub fn shift_matrix_generic(fam_prime: &AlphaFamily, params: &ShiftParams) -> Result<BiPoly> {
    if fam_prime.base() != Base::PolyX {
        return Err(Error::Invalid("shifts act on the polynomial base".into()));
    }
    let ring = fam_prime.ring();
    let mut fam = fam_prime.clone();
    let x_minus = Poly::from_terms(ring, [(1, RingValue::one(ring)), (0, -&params.lambda)]);
    let cap = fam.generator_support().unwrap_or(1) + 1;
    // s'(Y⊗a) for a = X − λ, then minus ξ·(1⊗a) = ξ·(a⊗1).
    let mut s = fam.eval_s(1, &x_minus, cap)?;
    s.add_scaled(&BiPoly::from_x_poly(&x_minus, 0), &-&params.xi);
    Ok(substitute_shift(&s, &params.lambda, &params.xi))
}

/// The family of `(g^{-1}⊗f^{-1})∘s'∘(f⊗g)` with `f(Y) = Y − ξ`, `g(X) = X − λ`.
/// Both computations of the shifted matrix must agree.
pub fn shift_equivalence(fam_prime: &AlphaFamily, params: &ShiftParams) -> Result<AlphaFamily> {
    let q = fam_prime.q_matrix();
    let closed = shift_matrix_closed(&q, params);
    let generic = shift_matrix_generic(fam_prime, params)?;
    if closed != generic {
        return Err(Error::InternalMismatch(format!(
            "shifted matrix: closed form {closed} vs composition {generic}"
        )));
    }
    let mut fam = AlphaFamily::from_q(Base::PolyX, &closed)?;
    fam.note(format!(
        "shift by lambda = {}, xi = {}",
        params.lambda, params.xi
    ));
    Ok(fam)
}

fn roots_of_first_nonzero(polys: &[Poly]) -> Result<Vec<RingValue>> {
    for p in polys {
        if !p.is_zero() {
            return p.rational_root_candidates();
        }
    }
    Ok(Vec::new())
}

/// Candidate shift pairs: `ξ` among the rational roots of the row
/// constraints with `λ = P'_0(ξ)`, and `λ` among the roots of the column
/// constraints with `ξ = Q'_0(λ)`. Sorted and deduplicated.
pub fn candidate_params(q: &BiPoly) -> Result<Vec<ShiftParams>> {
    let ring = q.ring();
    if !(ring.is_rational() || ring == crate::ring::RingDescriptor::Integers) {
        return Err(Error::UnsupportedRing(ring));
    }
    let (p, qq) = row_col_polys(q);
    let z = Poly::var(ring);
    let side = |v: &[Poly]| -> Vec<Poly> {
        let mut out = vec![get(v, 0, ring), &get(v, 1, ring) - &z];
        out.extend(v.iter().skip(2).cloned());
        out
    };
    let mut set = BTreeSet::new();
    let p0d = get(&p, 0, ring).formal_derivative();
    for xi in roots_of_first_nonzero(&side(&p))? {
        set.insert(ShiftParams::new(p0d.eval(&xi), xi));
    }
    let q0d = get(&qq, 0, ring).formal_derivative();
    for lambda in roots_of_first_nonzero(&side(&qq))? {
        let xi = q0d.eval(&lambda);
        set.insert(ShiftParams::new(lambda, xi));
    }
    Ok(set.into_iter().collect())
}

/// Searches rational shift pairs for the root conditions.
pub fn classify_almost_null(q: &BiPoly) -> Result<PlaneClassification> {
    let candidates: Vec<RootConditionVerdict> = candidate_params(q)?
        .iter()
        .map(|p| evaluate_conditions(q, p))
        .collect();
    let pick = |a: bool, b: bool| {
        candidates
            .iter()
            .find(|c| c.condition_a.holds == a && c.condition_b.holds == b)
            .map(|c| c.params.clone())
    };
    let verdict = if let Some(params) = pick(true, true) {
        PlaneVerdict::AlmostNull {
            shifted: shift_matrix_closed(q, &params),
            params,
        }
    } else if let Some(params) = pick(true, false) {
        PlaneVerdict::ObstructedUpper(params)
    } else if let Some(params) = pick(false, true) {
        PlaneVerdict::ObstructedLower(params)
    } else {
        PlaneVerdict::Unknown
    };
    Ok(PlaneClassification {
        verdict,
        candidates,
    })
}

/// Finite search for the failure of an upper bounded twisting map with
/// `s(Y⊗X) = Σ q_ij X^i⊗Y^j`.
///
/// The family is first verified as given. If that passes, it is verified
/// again under `α_j = 0` for `j > S`, for every support bound `S` from the
/// largest generator column up to `n`. Refuted means no such bound survives
/// to degree `n`; the returned witness is the one for the largest bound.
pub fn detect_obstruction(q: &BiPoly, n: usize) -> VerificationReport {
    let params = VerifyParams::new(n);
    let fam = match AlphaFamily::from_q(Base::PolyX, q) {
        Ok(f) => f,
        Err(e) => {
            return VerificationReport {
                degree_bound: n,
                status: Status::Inconclusive,
                witness: None,
                y_truncation: None,
                hypothesis: None,
                checks: 0,
                note: Some(e.to_string()),
            }
        }
    };
    let plain = verify_axioms(&fam, &params);
    if !plain.is_verified() {
        return plain;
    }
    let low = fam.generator_support().unwrap_or(1).max(1);
    let mut last = plain;
    for s in low..=n.max(low) {
        let r = verify_axioms(&fam.clone().assume_upper_bounded(s), &params);
        match r.status {
            Status::Verified => return r,
            Status::Inconclusive => return r,
            Status::Refuted => last = r,
        }
    }
    let at = last.witness.as_ref().map_or(0, |w| w.degree());
    last.note = Some(format!(
        "every support bound from {low} to {} is refuted; the last at degree {at}",
        n.max(low)
    ));
    last
}
