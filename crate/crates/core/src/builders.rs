//! Families whose twisting property is guaranteed by construction: Ore
//! extensions, almost null planes, derivation towers and two fixed
//! examples on truncated polynomial rings.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::{BiPoly, Poly};
use crate::ring::{RingDescriptor, RingValue};
use crate::twist::{compositions, AlphaFamily, Base};

/// `p(q)` reduced in the base after every product.
fn compose_in(base: Base, p: &Poly, q: &Poly) -> Poly {
    let ring = p.ring();
    let mut out = Poly::zero(ring);
    let mut power = Poly::one(ring);
    let mut at = 0usize;
    for (d, c) in p.terms() {
        while at < d {
            power = base.reduce(&power * q);
            at += 1;
        }
        out.add_scaled(&power, c);
    }
    base.reduce(out)
}

/// An algebra endomorphism of the base, given by the image of the generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoSpec {
    base: Base,
    image: Poly,
}

impl EndoSpec {
    /// Fails on `k[t]/(t^n)` when `image^n ≠ 0`, since `t^n = 0` must map to 0.
    pub fn new(base: Base, image: Poly) -> Result<Self> {
        let image = base.reduce(image);
        if let Base::Quot(n) = base {
            let p = compose_in(base, &Poly::monomial(RingValue::one(image.ring()), n), &image);
            let full = (0..n).fold(Poly::one(image.ring()), |acc, _| base.reduce(&acc * &image));
            if !p.is_zero() || !full.is_zero() {
                return Err(Error::QuotientRelation(format!(
                    "({})^{n} is nonzero modulo t^{n}",
                    image.display_with("t")
                )));
            }
        }
        Ok(EndoSpec { base, image })
    }

    pub fn identity(base: Base, ring: RingDescriptor) -> Self {
        EndoSpec {
            base,
            image: base.reduce(Poly::var(ring)),
        }
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn ring(&self) -> RingDescriptor {
        self.image.ring()
    }

    pub fn image(&self) -> &Poly {
        &self.image
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        compose_in(self.base, p, &self.image)
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &EndoSpec) -> EndoSpec {
        EndoSpec {
            base: self.base,
            image: self.apply(&other.image),
        }
    }

    pub fn inverse(&self) -> Result<EndoSpec> {
        let ring = self.ring();
        match self.base {
            Base::PolyX => {
                let deg = self.image.degree().finite();
                let a = self.image.coeff(1);
                let inv = a.inverse();
                match (deg, inv) {
                    (Some(1), Some(inv)) => {
                        let b = self.image.coeff(0);
                        let image = Poly::from_terms(ring, [(1, inv.clone()), (0, -(&b * &inv))]);
                        Ok(EndoSpec {
                            base: self.base,
                            image,
                        })
                    }
                    _ => Err(Error::NotInvertible(format!(
                        "X ↦ {} is not an automorphism of k[X]",
                        self.image
                    ))),
                }
            }
            Base::Quot(n) => {
                let t = crate::poly::TruncPoly::from_poly(&self.image, n)?;
                let h = t.reversion()?;
                Ok(EndoSpec {
                    base: self.base,
                    image: h.to_poly(),
                })
            }
        }
    }

    /// `self^r`, using the inverse for negative `r`.
    pub fn power(&self, r: i64) -> Result<EndoSpec> {
        let step = if r < 0 { self.inverse()? } else { self.clone() };
        let mut acc = EndoSpec::identity(self.base, self.ring());
        for _ in 0..r.unsigned_abs() {
            acc = step.after(&acc);
        }
        Ok(acc)
    }
}

/// A `(φ, ψ)`-derivation `d(ab) = d(a)ψ(b) + φ(a)d(b)`, given by `d(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivSpec {
    base: Base,
    image: Poly,
    phi: EndoSpec,
    psi: EndoSpec,
}

impl DerivSpec {
    pub fn new(phi: EndoSpec, psi: EndoSpec, image: Poly) -> Result<Self> {
        let base = phi.base;
        if psi.base != base {
            return Err(Error::Invalid("derivation twists live on different bases".into()));
        }
        let d = DerivSpec {
            base,
            image: base.reduce(image),
            phi,
            psi,
        };
        if let Base::Quot(n) = base {
            let v = d.on_power(n);
            if !v.is_zero() {
                return Err(Error::DerivationCheck(format!(
                    "d(t^{n}) = {} is nonzero, so d does not descend to the quotient",
                    v.display_with("t")
                )));
            }
        }
        Ok(d)
    }

    /// The zero derivation with the given twists.
    pub fn zero(phi: EndoSpec, psi: EndoSpec) -> Result<Self> {
        let ring = phi.ring();
        Self::new(phi, psi, Poly::zero(ring))
    }

    pub fn image(&self) -> &Poly {
        &self.image
    }

    pub fn phi(&self) -> &EndoSpec {
        &self.phi
    }

    pub fn psi(&self) -> &EndoSpec {
        &self.psi
    }

    /// `d(X^m)` via `d(X^{m-1}·X)`, without reducing `X^m` first.
    fn on_power(&self, m: usize) -> Poly {
        let ring = self.image.ring();
        let mut d = Poly::zero(ring);
        let x = Poly::var(ring);
        let psi_x = self.psi.apply(&x);
        let mut a = Poly::one(ring);
        for _ in 0..m {
            d = self
                .base
                .reduce(&(&d * &psi_x) + &(&self.phi.apply(&a) * &self.image));
            a = &a * &x;
        }
        d
    }

    pub fn apply_mono(&self, k: usize) -> Poly {
        if !self.base.has_level(k) {
            return Poly::zero(self.image.ring());
        }
        self.on_power(k)
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero(p.ring());
        for (k, c) in p.terms() {
            out.add_scaled(&self.apply_mono(k), c);
        }
        self.base.reduce(out)
    }

    /// Checks the Leibniz rule on `X^a·X^b` for `a + b ≤ bound`.
    pub fn check_leibniz(&self, bound: usize) -> Result<()> {
        let ring = self.image.ring();
        let one = RingValue::one(ring);
        for total in 0..=bound {
            for a in 0..=total {
                let b = total - a;
                let xa = self.base.reduce(Poly::monomial(one.clone(), a));
                let xb = self.base.reduce(Poly::monomial(one.clone(), b));
                let lhs = self.apply(&self.base.reduce(&xa * &xb));
                let rhs = self.base.reduce(
                    &(&self.apply(&xa) * &self.psi.apply(&xb))
                        + &(&self.phi.apply(&xa) * &self.apply(&xb)),
                );
                if lhs != rhs {
                    return Err(Error::DerivationCheck(format!(
                        "Leibniz fails on X^{a}·X^{b}: {lhs} vs {rhs}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A linear operator on the base built from endomorphisms and derivations.
#[derive(Clone, Debug)]
pub enum Operator {
    Endo(EndoSpec),
    Deriv(DerivSpec),
    /// Applied right to left.
    Chain(Vec<Operator>),
    Zero,
}

impl Operator {
    pub fn apply(&self, p: &Poly) -> Poly {
        match self {
            Operator::Endo(e) => e.apply(p),
            Operator::Deriv(d) => d.apply(p),
            Operator::Chain(ops) => ops.iter().rev().fold(p.clone(), |acc, op| op.apply(&acc)),
            Operator::Zero => Poly::zero(p.ring()),
        }
    }
}

/// `β_{i_1}∘α^{-1}∘β_{i_2}∘…∘α^{-1}∘β_{i_l}`; the empty word gives `α`.
pub fn beta_composite(
    betas: &BTreeMap<usize, DerivSpec>,
    alpha: &EndoSpec,
    word: &[usize],
) -> Result<Operator> {
    if word.is_empty() {
        return Ok(Operator::Endo(alpha.clone()));
    }
    let inv = if word.len() > 1 {
        Some(alpha.inverse()?)
    } else {
        None
    };
    let mut ops = Vec::new();
    for (pos, i) in word.iter().enumerate() {
        if pos > 0 {
            ops.push(Operator::Endo(inv.clone().expect("inverse computed")));
        }
        match betas.get(i) {
            Some(b) => ops.push(Operator::Deriv(b.clone())),
            None => return Ok(Operator::Zero),
        }
    }
    Ok(Operator::Chain(ops))
}

fn check_same_base(alpha: &EndoSpec, d: &DerivSpec) -> Result<()> {
    if d.base != alpha.base || d.image.ring() != alpha.ring() {
        return Err(Error::Invalid(
            "endomorphism and derivation live on different algebras".into(),
        ));
    }
    Ok(())
}

/// Levels of a family on the base: `1` for `k[X]`, `0..n` for `k[t]/(t^n)`.
fn table_levels(base: Base) -> Vec<usize> {
    match base {
        Base::PolyX => vec![1],
        Base::Quot(n) => (1..n).collect(),
    }
}

/// `s(Y⊗a) = α(a)⊗Y + δ(a)⊗1`, with `δ` an `(α, id)`-derivation.
pub fn build_ore(alpha: &EndoSpec, delta: &DerivSpec) -> Result<AlphaFamily> {
    check_same_base(alpha, delta)?;
    let id = EndoSpec::identity(alpha.base, alpha.ring());
    if delta.phi != *alpha || delta.psi != id {
        return Err(Error::DerivationCheck(
            "delta must be an (alpha, id)-derivation".into(),
        ));
    }
    delta.check_leibniz(10)?;
    let ring = alpha.ring();
    let mut tables = BTreeMap::new();
    for m in table_levels(alpha.base) {
        let x = Poly::monomial(RingValue::one(ring), m);
        tables.insert((0, m), delta.apply(&x));
        tables.insert((1, m), alpha.apply(&x));
    }
    let mut fam = AlphaFamily::from_tables(ring, alpha.base, &tables)?.with_y_limit(1);
    fam.note("ore extension: alpha_0 = delta, alpha_1 = alpha");
    Ok(fam)
}

/// The family with `α_0 = 0`, `α_1 = ev_0` and `α_j(X) = Σ_i q_ij X^i`,
/// for `q` vanishing on rows and columns 0 and 1.
pub fn build_almost_null(q: &BiPoly) -> Result<AlphaFamily> {
    if let Some((i, j, _)) = q.terms().find(|&(i, j, _)| i <= 1 || j <= 1) {
        return Err(Error::SupportViolation { i, j });
    }
    let top = q.terms().map(|(_, j, _)| j).max().unwrap_or(1);
    let mut fam = AlphaFamily::from_q(Base::PolyX, q)?.with_y_limit(top);
    let ring = q.ring();
    for r in 1..=10usize {
        for s in 1..=10usize.saturating_sub(r) {
            if r + s <= 2 {
                continue;
            }
            let v = fam.eval_s(r, &Poly::monomial(RingValue::one(ring), s), 10)?;
            if !v.is_zero() {
                return Err(Error::InternalMismatch(format!(
                    "s(Y^{r}⊗X^{s}) = {v} should vanish"
                )));
            }
        }
    }
    fam.note("almost null on the nose: s(Y^r⊗X^s) = 0 for r, s > 0, r + s > 2 (checked to 10)");
    Ok(fam)
}

/// How a derivation tower was established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerReport {
    /// `α_j = 0` for `j` above this bound (proven by nilpotency on a finite basis).
    pub exact_bound: Option<usize>,
    pub checked_bound: usize,
}

/// The family `α_0 = 0`, `α_1 = α`, `α_j = Σ_l Σ_{|i_1..i_l| = j-1} β_{(i_1..i_l)}`.
///
/// Each `β_i` must be an `(α, α^{i+1})`-derivation, and the orthogonality
/// condition `α^r(β_i(a))·β_{i'}(b) = 0` for `i + i' ≥ 3` is checked on basis
/// monomials of degree `≤ bound` and `|r| ≤ bound`. On `k[t]/(t^n)` the
/// tables are complete once all words of some length vanish; on `k[X]` only
/// the generator images up to `j_max` are stored.
pub fn build_derivation_tower(
    alpha: &EndoSpec,
    betas: &BTreeMap<usize, DerivSpec>,
    j_max: usize,
    bound: usize,
) -> Result<(AlphaFamily, TowerReport)> {
    let base = alpha.base;
    let ring = alpha.ring();
    let betas = validated_betas(alpha, betas, bound)?;
    let one = RingValue::one(ring);
    let i_max = betas.keys().next_back().copied().unwrap_or(0);
    let mut report = TowerReport {
        exact_bound: None,
        checked_bound: bound,
    };
    let mut top = j_max;
    if let Base::Quot(n) = base {
        if i_max == 0 {
            report.exact_bound = Some(1);
            top = 1;
        } else {
            let length = nilpotent_length(alpha, &betas, n, n + 1)?.ok_or_else(|| {
                Error::Hypothesis(format!(
                    "words of length up to {} do not all vanish; the tower is not finite",
                    n + 1
                ))
            })?;
            let exact = (length - 1) * i_max + 1;
            report.exact_bound = Some(exact);
            top = exact;
        }
    }
    let mut tables = BTreeMap::new();
    for m in table_levels(base) {
        let x = Poly::monomial(one.clone(), m);
        tables.insert((1, m), alpha.apply(&x));
    }
    for j in 2..=top {
        for m in table_levels(base) {
            let x = Poly::monomial(one.clone(), m);
            tables.insert((j, m), tower_value(alpha, &betas, j, &x)?);
        }
    }
    let mut fam = AlphaFamily::from_tables(ring, base, &tables)?;
    if let Some(e) = report.exact_bound {
        fam = fam.with_y_limit(e);
        fam.note(format!("derivation tower: alpha_j = 0 for j > {e} (nilpotent words)"));
    } else {
        let tail_zero = ((j_max / 2).max(2)..=j_max)
            .all(|j| fam.stored_cell(j, 1).is_none_or(Poly::is_zero));
        fam.note(format!(
            "derivation tower: generator images computed for j <= {j_max}; finiteness {} on X",
            if tail_zero { "observed" } else { "not observed" }
        ));
    }
    fam.note(format!(
        "orthogonality condition checked on degrees <= {bound}, |r| <= {bound}"
    ));
    Ok((fam, report))
}

/// Drops derivations that vanish on the basis, then checks the twist of each
/// `β_i`, the Leibniz rule and the orthogonality condition.
pub(crate) fn validated_betas(
    alpha: &EndoSpec,
    betas: &BTreeMap<usize, DerivSpec>,
    bound: usize,
) -> Result<BTreeMap<usize, DerivSpec>> {
    let base = alpha.base;
    let betas: BTreeMap<usize, DerivSpec> = betas
        .iter()
        .filter(|(_, b)| {
            !table_levels(base)
                .iter()
                .all(|&k| b.apply_mono(k).is_zero())
        })
        .map(|(&i, b)| (i, b.clone()))
        .collect();
    for (&i, b) in &betas {
        check_same_base(alpha, b)?;
        if i == 0 {
            return Err(Error::Hypothesis("derivation indices start at 1".into()));
        }
        let target = alpha.power(i as i64 + 1)?;
        if b.phi != *alpha || b.psi != target {
            return Err(Error::Hypothesis(format!(
                "beta_{i} is not an (alpha, alpha^{})-derivation",
                i + 1
            )));
        }
        b.check_leibniz(bound)?;
    }
    check_orthogonality(alpha, &betas, bound)?;
    Ok(betas)
}

/// `α_j(x) = Σ_l Σ_{|w| = j-1} β_w(x)` for `j ≥ 2`.
pub(crate) fn tower_value(
    alpha: &EndoSpec,
    betas: &BTreeMap<usize, DerivSpec>,
    j: usize,
    x: &Poly,
) -> Result<Poly> {
    let mut acc = Poly::zero(alpha.ring());
    for l in 1..j {
        for word in compositions(j - 1, l, 1) {
            if word.iter().any(|i| !betas.contains_key(i)) {
                continue;
            }
            acc = &acc + &beta_composite(betas, alpha, &word)?.apply(x);
        }
    }
    Ok(alpha.base.reduce(acc))
}

/// Smallest `L ≤ max_len` such that every `β`-word of length `L` vanishes on
/// the basis of `k[t]/(t^n)`.
fn nilpotent_length(
    alpha: &EndoSpec,
    betas: &BTreeMap<usize, DerivSpec>,
    n: usize,
    max_len: usize,
) -> Result<Option<usize>> {
    let ring = alpha.ring();
    let keys: Vec<usize> = betas.keys().copied().collect();
    // Image of each basis element under all words of the current length,
    // kept as the list of distinct nonzero results per word.
    let basis: Vec<Poly> = (0..n)
        .map(|k| Poly::monomial(RingValue::one(ring), k))
        .collect();
    let inv = alpha.inverse()?;
    // Words are B_{i1}…B_{iL}·α with B_i = β_i∘α^{-1}; track v = (B…B)(α(x)).
    let mut frontier: Vec<Poly> = basis
        .iter()
        .map(|x| alpha.apply(x))
        .filter(|p| !p.is_zero())
        .collect();
    for len in 1..=max_len {
        let mut next = Vec::new();
        for v in &frontier {
            let w = inv.apply(v);
            for i in &keys {
                let p = betas[i].apply(&w);
                if !p.is_zero() && !next.contains(&p) {
                    next.push(p);
                }
            }
        }
        if next.is_empty() {
            return Ok(Some(len));
        }
        frontier = next;
    }
    Ok(None)
}

fn check_orthogonality(
    alpha: &EndoSpec,
    betas: &BTreeMap<usize, DerivSpec>,
    bound: usize,
) -> Result<()> {
    let base = alpha.base;
    let ring = alpha.ring();
    let degrees: Vec<usize> = (0..=bound).filter(|&k| base.has_level(k)).collect();
    let powers: Vec<(i64, EndoSpec)> = (-(bound as i64)..=bound as i64)
        .filter_map(|r| alpha.power(r).ok().map(|e| (r, e)))
        .collect();
    for (&i, bi) in betas {
        for (&i2, bi2) in betas {
            if i + i2 < 3 {
                continue;
            }
            for &a in &degrees {
                let ba = bi.apply_mono(a);
                if ba.is_zero() {
                    continue;
                }
                for &b in &degrees {
                    let bb = bi2.apply_mono(b);
                    if bb.is_zero() {
                        continue;
                    }
                    for (r, ar) in &powers {
                        let prod = base.reduce(&ar.apply(&ba) * &bb);
                        if !prod.is_zero() {
                            return Err(Error::Hypothesis(format!(
                                "alpha^{r}(beta_{i}(X^{a}))·beta_{i2}(X^{b}) = {} is nonzero",
                                prod.display_with("t")
                            )));
                        }
                    }
                }
            }
        }
    }
    let _ = ring;
    Ok(())
}

/// Checks that `β_(w)` is an `(α, α^j)`-derivation with `j = 1 + Σ w`, on
/// monomial pairs of total degree `≤ bound`.
pub fn word_is_derivation(
    alpha: &EndoSpec,
    betas: &BTreeMap<usize, DerivSpec>,
    word: &[usize],
    bound: usize,
) -> Result<bool> {
    let op = beta_composite(betas, alpha, word)?;
    let j = 1 + word.iter().sum::<usize>();
    let aj = alpha.power(j as i64)?;
    let base = alpha.base;
    let one = RingValue::one(alpha.ring());
    for total in 0..=bound {
        for a in 0..=total {
            let xa = base.reduce(Poly::monomial(one.clone(), a));
            let xb = base.reduce(Poly::monomial(one.clone(), total - a));
            let lhs = op.apply(&base.reduce(&xa * &xb));
            let rhs = base.reduce(
                &(&op.apply(&xa) * &aj.apply(&xb)) + &(&alpha.apply(&xa) * &op.apply(&xb)),
            );
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// On `k[t]/(t^2)`: `α_0 = 0`, `α_1 = id`, `α_2(λ + μt) = μt`.
pub fn build_dual_square(ring: RingDescriptor) -> AlphaFamily {
    let t = Poly::var(ring);
    let mut tables = BTreeMap::new();
    tables.insert((1, 1), t.clone());
    tables.insert((2, 1), t);
    let mut fam = AlphaFamily::from_tables(ring, Base::Quot(2), &tables)
        .expect("fixed tables are well formed")
        .with_y_limit(2);
    fam.note("dual numbers: alpha_1 = id, alpha_2(a + bt) = bt");
    fam
}

/// On `k[t]/(t^n)`: `α_1 = id` and `α_{j+1} = D^j` with `D(P) = P'·t^2`,
/// filled from the closed form `D^j(t^m) = m(m+1)…(m+j-1)·t^{m+j}`.
pub fn build_truncated_derivation(ring: RingDescriptor, n: usize) -> Result<AlphaFamily> {
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    let mut tables = BTreeMap::new();
    for m in 1..n {
        tables.insert((1, m), Poly::monomial(RingValue::one(ring), m));
        for j in 1..n {
            if m + j >= n {
                break;
            }
            let rising = (m..m + j).fold(RingValue::one(ring), |acc, f| {
                &acc * &RingValue::from_i64(ring, f as i64)
            });
            tables.insert((j + 1, m), Poly::monomial(rising, m + j));
        }
    }
    let mut fam = AlphaFamily::from_tables(ring, Base::Quot(n), &tables)?
        .with_y_limit(n.saturating_sub(1).max(1));
    fam.note(format!("truncated derivation tower on k[t]/(t^{n}), closed form"));
    Ok(fam)
}

/// The derivation `P ↦ P'·t^2` on `k[t]/(t^n)` as an `(id, id)`-derivation.
pub fn square_shift_derivation(ring: RingDescriptor, n: usize) -> Result<DerivSpec> {
    let base = Base::Quot(n);
    let id = EndoSpec::identity(base, ring);
    DerivSpec::new(id.clone(), id, Poly::monomial(RingValue::one(ring), 2))
}
