//! Candidate twisting maps `s: k[Y]⊗A → A⊗k[Y]` given by their α-family,
//! with `s(Y⊗a) = Σ_j α_j(a)⊗Y^j`.
//!
//! A family stores cells `α_j(X^m)`. Level 0 holds the unit values, level 1
//! the generator images (the q-matrix), higher levels are either supplied or
//! derived from `α_j(X^m) = Σ_r α_r(X^{m-1}) γ_j^(r)(X)`.
//!
//! Two evaluation strategies are used:
//! * graded (`α_0 = 0`): cells are computed one at a time by induction on
//!   `(j, m)`, since every composition in `γ_j^(r)` uses indices below `j`.
//!   The `Y`-degree never drops, so checks modulo `Y^{cap+1}` are exact.
//! * general: whole columns are computed level by level. If a column needs
//!   itself (a cycle) the family is reported as not well founded.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{BiPoly, Poly};
use crate::ring::{RingDescriptor, RingValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Base {
    PolyX,
    /// `k[t]/(t^n)`.
    Quot(usize),
}

impl Base {
    pub fn reduce(&self, p: Poly) -> Poly {
        match *self {
            Base::PolyX => p,
            Base::Quot(n) => p.truncate(n),
        }
    }

    /// Whether `X^m` is nonzero in the base.
    pub fn has_level(&self, m: usize) -> bool {
        match *self {
            Base::PolyX => true,
            Base::Quot(n) => m < n,
        }
    }

    fn mono(&self, ring: RingDescriptor, k: usize) -> Poly {
        if self.has_level(k) {
            Poly::monomial(RingValue::one(ring), k)
        } else {
            Poly::zero(ring)
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::PolyX => write!(f, "k[X]"),
            Base::Quot(n) => write!(f, "k[t]/(t^{n})"),
        }
    }
}

/// Guards against runaway degrees or table sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_degree: usize,
    pub max_cells: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_degree: 128,
            max_cells: 400_000,
        }
    }
}

type Column = BTreeMap<usize, Poly>;

#[derive(Clone, Debug)]
pub struct AlphaFamily {
    ring: RingDescriptor,
    base: Base,
    /// level `m` → `j` → `α_j(X^m)`.
    levels: BTreeMap<usize, Column>,
    /// Every level up to this one is fully stored; missing cells are zero.
    complete_levels: usize,
    /// Cells with `j` above this bound are zero by definition.
    y_limit: Option<usize>,
    hypothesis: Option<String>,
    provenance: Vec<String>,
    limits: Limits,
    cell_count: usize,
    gamma_cache: BTreeMap<(usize, usize, usize), Poly>,
    series_cache: BTreeMap<(usize, usize), Column>,
}

impl AlphaFamily {
    /// Family determined by `q`, where `(i, j, c)` means `X^i` has coefficient
    /// `c` in `α_j(X)`.
    pub fn from_q(base: Base, q: &BiPoly) -> Result<Self> {
        let ring = q.ring();
        let mut gen: Column = BTreeMap::new();
        for (i, j, c) in q.terms() {
            if base.has_level(i) {
                gen.entry(j).or_insert_with(|| Poly::zero(ring)).add_term(i, c);
            }
        }
        let mut levels = BTreeMap::new();
        levels.insert(0, unit_column(ring));
        if base.has_level(1) {
            levels.insert(1, gen);
        }
        Ok(Self::assemble(ring, base, levels, 1))
    }

    /// Family given by explicit cells `(j, m) → α_j(X^m)`; every level up to
    /// the highest supplied one is taken as complete. Level 0 defaults to
    /// `α_j(1) = δ_{j1}` when no level-0 cell is supplied.
    pub fn from_tables(
        ring: RingDescriptor,
        base: Base,
        tables: &BTreeMap<(usize, usize), Poly>,
    ) -> Result<Self> {
        let mut levels: BTreeMap<usize, Column> = BTreeMap::new();
        let mut top = 1;
        for (&(j, m), p) in tables {
            if p.ring() != ring {
                return Err(Error::RingMismatch {
                    left: ring,
                    right: p.ring(),
                });
            }
            if !base.has_level(m) {
                if !base.reduce(p.clone()).is_zero() {
                    return Err(Error::Invalid(format!(
                        "cell (j={j}, m={m}) lies beyond the quotient"
                    )));
                }
                continue;
            }
            top = top.max(m);
            levels.entry(m).or_default().insert(j, base.reduce(p.clone()));
        }
        levels.entry(0).or_insert_with(|| unit_column(ring));
        Ok(Self::assemble(ring, base, levels, top))
    }

    fn assemble(
        ring: RingDescriptor,
        base: Base,
        mut levels: BTreeMap<usize, Column>,
        complete: usize,
    ) -> Self {
        for col in levels.values_mut() {
            col.retain(|_, p| !p.is_zero());
        }
        let cell_count = levels.values().map(BTreeMap::len).sum();
        AlphaFamily {
            ring,
            base,
            levels,
            complete_levels: complete,
            y_limit: None,
            hypothesis: None,
            provenance: Vec::new(),
            limits: Limits::default(),
            cell_count,
            gamma_cache: BTreeMap::new(),
            series_cache: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn y_limit(&self) -> Option<usize> {
        self.y_limit
    }

    /// Declares `α_j = 0` for `j > limit`.
    pub fn with_y_limit(mut self, limit: usize) -> Self {
        self.y_limit = Some(self.y_limit.map_or(limit, |l| l.min(limit)));
        self.clear_caches();
        self.truncate_to_limit();
        self
    }

    /// Verifies under the extra assumption `α_j = 0` for `j > support`.
    pub fn assume_upper_bounded(self, support: usize) -> Self {
        let mut f = self.with_y_limit(support);
        f.hypothesis = Some(format!("upper bounded: alpha_j = 0 for j > {support}"));
        f
    }

    pub fn hypothesis(&self) -> Option<&str> {
        self.hypothesis.as_deref()
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.provenance.push(s.into());
    }

    pub fn complete_levels(&self) -> usize {
        self.complete_levels
    }

    /// `α_0 = 0` on the generator, hence everywhere.
    pub fn is_graded(&self) -> bool {
        self.levels
            .get(&1)
            .and_then(|c| c.get(&0))
            .is_none_or(Poly::is_zero)
    }

    /// The level-1 data as `(i, j, c)` triples.
    pub fn q_matrix(&self) -> BiPoly {
        let mut b = BiPoly::zero(self.ring);
        if let Some(col) = self.levels.get(&1) {
            for (&j, p) in col {
                for (i, c) in p.terms() {
                    b.add_term(i, j, c);
                }
            }
        }
        b
    }

    /// Largest `j` with `α_j(X) ≠ 0`.
    pub fn generator_support(&self) -> Option<usize> {
        self.levels
            .get(&1)
            .and_then(|c| c.iter().rev().find(|(_, p)| !p.is_zero()).map(|(&j, _)| j))
    }

    /// Stored cell without triggering computation.
    pub fn stored_cell(&self, j: usize, m: usize) -> Option<&Poly> {
        self.levels.get(&m).and_then(|c| c.get(&j))
    }

    /// All stored nonzero cells as `((j, m), α_j(X^m))`, ordered by `(m, j)`.
    pub fn stored_cells(&self) -> Vec<((usize, usize), Poly)> {
        self.levels
            .iter()
            .flat_map(|(&m, col)| {
                col.iter()
                    .filter(|(_, p)| !p.is_zero())
                    .map(move |(&j, p)| ((j, m), p.clone()))
            })
            .collect()
    }

    /// Overwrites one cell; used to build corrupted families in tests.
    pub fn set_cell(&mut self, j: usize, m: usize, p: Poly) {
        let p = self.base.reduce(p);
        self.levels.entry(m).or_default().insert(j, p);
        if m > self.complete_levels && !self.is_graded() {
            self.complete_levels = m;
        }
        self.clear_caches();
    }

    fn clear_caches(&mut self) {
        self.gamma_cache.clear();
        self.series_cache.clear();
    }

    fn truncate_to_limit(&mut self) {
        if let Some(l) = self.y_limit {
            for col in self.levels.values_mut() {
                col.retain(|&j, _| j <= l);
            }
        }
    }

    fn zero(&self) -> Poly {
        Poly::zero(self.ring)
    }

    fn guard(&mut self, p: &Poly) -> Result<()> {
        if let Some(d) = p.degree().finite() {
            if d > self.limits.max_degree {
                return Err(Error::ResourceLimit(format!(
                    "degree {d} exceeds {}",
                    self.limits.max_degree
                )));
            }
        }
        if self.cell_count > self.limits.max_cells {
            return Err(Error::ResourceLimit(format!(
                "more than {} cells",
                self.limits.max_cells
            )));
        }
        Ok(())
    }

    fn store(&mut self, j: usize, m: usize, p: Poly) {
        self.cell_count += 1;
        self.levels.entry(m).or_default().insert(j, p);
    }

    /// `α_j(X^m)`, computing and memoizing it if necessary.
    pub fn cell(&mut self, j: usize, m: usize) -> Result<Poly> {
        if let Some(p) = self.stored_cell(j, m) {
            return Ok(p.clone());
        }
        if !self.base.has_level(m) || m <= self.complete_levels {
            return Ok(self.zero());
        }
        if self.y_limit.is_some_and(|l| j > l) {
            return Ok(self.zero());
        }
        if self.is_graded() {
            if j == 0 {
                return Ok(self.zero());
            }
            self.fill_graded(j, m)?;
        } else {
            self.fill_levels(m)?;
        }
        Ok(self.stored_cell(j, m).cloned().unwrap_or_else(|| self.zero()))
    }

    fn fill_graded(&mut self, j: usize, m: usize) -> Result<()> {
        let mut start = m;
        while start > self.complete_levels + 1 && self.stored_cell(j, start - 1).is_none() {
            start -= 1;
        }
        for mm in start..=m {
            if self.stored_cell(j, mm).is_some() {
                continue;
            }
            let mut acc = self.zero();
            for r in 1..=j {
                let a = self.cell(r, mm - 1)?;
                if a.is_zero() {
                    continue;
                }
                let g = self.gamma_mono(j, r, 1)?;
                if !g.is_zero() {
                    acc = &acc + &(&a * &g);
                }
            }
            let acc = self.base.reduce(acc);
            self.guard(&acc)?;
            self.store(j, mm, acc);
        }
        Ok(())
    }

    /// Completes every level up to `target` (general strategy).
    fn fill_levels(&mut self, target: usize) -> Result<()> {
        let target = match self.base {
            Base::Quot(n) => target.min(n.saturating_sub(1)),
            Base::PolyX => target,
        };
        while self.complete_levels < target {
            let m = self.complete_levels + 1;
            let prev: Vec<(usize, Poly)> = self
                .levels
                .get(&(m - 1))
                .map(|c| {
                    c.iter()
                        .filter(|(_, p)| !p.is_zero())
                        .map(|(&r, p)| (r, p.clone()))
                        .collect()
                })
                .unwrap_or_default();
            let mut col: Column = BTreeMap::new();
            for (r, a) in prev {
                let g = self.g_series(r, 1, Some(m))?;
                for (j, p) in g {
                    let e = col.entry(j).or_insert_with(|| Poly::zero(self.ring));
                    *e = &*e + &(&a * &p);
                }
            }
            let mut kept = BTreeMap::new();
            for (j, p) in col {
                let p = self.base.reduce(p);
                if p.is_zero() || self.y_limit.is_some_and(|l| j > l) {
                    continue;
                }
                self.guard(&p)?;
                kept.insert(j, p);
            }
            self.cell_count += kept.len();
            let slot = self.levels.entry(m).or_default();
            for (j, p) in kept {
                slot.entry(j).or_insert(p);
            }
            self.complete_levels = m;
        }
        Ok(())
    }

    /// `s(Y^r⊗X^k)` as `j → γ_j^(r)(X^k)`, by applying `s(Y⊗·)` `r` times.
    /// `computing` names a level under construction that must not be read.
    fn g_series(&mut self, r: usize, k: usize, computing: Option<usize>) -> Result<Column> {
        if let Some(c) = self.series_cache.get(&(r, k)) {
            return Ok(c.clone());
        }
        let mut cur: Column = BTreeMap::new();
        let x = self.base.mono(self.ring, k);
        if !x.is_zero() {
            cur.insert(0, x);
        }
        for step in 1..=r {
            let mut next: Column = BTreeMap::new();
            for (i, b) in &cur {
                for (d, c) in b.terms() {
                    match computing {
                        Some(mm) if d >= mm => {
                            return Err(Error::NotWellFounded { j: step, m: mm });
                        }
                        None if d > self.complete_levels => self.fill_levels(d)?,
                        _ => {}
                    }
                    if let Some(col) = self.levels.get(&d) {
                        for (&jp, p) in col {
                            let e = next.entry(i + jp).or_insert_with(|| Poly::zero(self.ring));
                            e.add_scaled(p, c);
                        }
                    }
                }
            }
            let mut reduced = BTreeMap::new();
            for (j, p) in next {
                let p = self.base.reduce(p);
                if !p.is_zero() {
                    self.guard(&p)?;
                    reduced.insert(j, p);
                }
            }
            cur = reduced;
        }
        self.series_cache.insert((r, k), cur.clone());
        Ok(cur)
    }

    /// `α_l(p)` by linearity.
    pub fn apply(&mut self, l: usize, p: &Poly) -> Result<Poly> {
        let mut acc = self.zero();
        for (k, c) in p.terms() {
            let a = self.cell(l, k)?;
            acc.add_scaled(&a, c);
        }
        Ok(self.base.reduce(acc))
    }

    /// `γ_j^(r)(X^k)`.
    pub fn gamma_mono(&mut self, j: usize, r: usize, k: usize) -> Result<Poly> {
        if !self.base.has_level(k) {
            return Ok(self.zero());
        }
        if r == 0 {
            return Ok(if j == 0 {
                self.base.mono(self.ring, k)
            } else {
                self.zero()
            });
        }
        if !self.is_graded() {
            let g = self.g_series(r, k, None)?;
            return Ok(g.get(&j).cloned().unwrap_or_else(|| self.zero()));
        }
        if r > j {
            return Ok(self.zero());
        }
        if r == 1 {
            return self.cell(j, k);
        }
        if let Some(p) = self.gamma_cache.get(&(j, r, k)) {
            return Ok(p.clone());
        }
        let mut top = j - r + 1;
        if let Some(l) = self.y_limit {
            top = top.min(l);
        }
        let mut acc = self.zero();
        for l in 1..=top {
            let inner = self.gamma_mono(j - l, r - 1, k)?;
            if inner.is_zero() {
                continue;
            }
            let a = self.apply(l, &inner)?;
            acc = &acc + &a;
        }
        let acc = self.base.reduce(acc);
        self.guard(&acc)?;
        self.gamma_cache.insert((j, r, k), acc.clone());
        Ok(acc)
    }

    /// `γ_j^(r)(a)` by linearity.
    pub fn gamma(&mut self, j: usize, r: usize, a: &Poly) -> Result<Poly> {
        let mut acc = self.zero();
        for (k, c) in a.terms() {
            let g = self.gamma_mono(j, r, k)?;
            acc.add_scaled(&g, c);
        }
        Ok(acc)
    }

    /// Exact bound on the `Y`-degree of `s(Y^r⊗a)`, when one is known.
    pub fn exact_y_bound(&self, r: usize) -> Option<usize> {
        if !self.is_graded() {
            return None;
        }
        self.y_limit.map(|l| r * l)
    }

    /// Columns `j` to inspect for `s(Y^r⊗·)` in the graded strategy.
    fn y_range(&self, r: usize, y_cap: usize) -> usize {
        self.exact_y_bound(r).unwrap_or(y_cap)
    }

    /// `s(Y^r⊗a) = Σ_j γ_j^(r)(a)⊗Y^j`.
    ///
    /// For graded families without a declared `Y`-support the result is taken
    /// modulo `Y^{y_cap+1}`; otherwise it is exact and `y_cap` is ignored.
    pub fn eval_s(&mut self, r: usize, a: &Poly, y_cap: usize) -> Result<BiPoly> {
        let mut out = BiPoly::zero(self.ring);
        if self.is_graded() {
            let top = self.y_range(r, y_cap);
            for j in r.min(top + 1)..=top {
                let g = self.gamma(j, r, a)?;
                out = &out + &BiPoly::from_x_poly(&g, j);
            }
        } else {
            for (k, c) in a.terms() {
                for (j, p) in self.g_series(r, k, None)? {
                    out = &out + &BiPoly::from_x_poly(&p.scalar_mul(c), j);
                }
            }
        }
        Ok(out)
    }

    /// Twisted product `(X^a⊗Y^b)(X^c⊗Y^d) = X^a·s(Y^b⊗X^c)·Y^d`, extended
    /// bilinearly. Graded families without declared support are reduced
    /// modulo `Y^{y_cap+1}` (an ideal for such products).
    pub fn mul_twisted(&mut self, u: &BiPoly, v: &BiPoly, y_cap: usize) -> Result<BiPoly> {
        let mut out = BiPoly::zero(self.ring);
        let truncate = self.is_graded() && self.y_limit.is_none();
        for (a, b, x) in u.terms() {
            for (c, d, y) in v.terms() {
                let s = self.eval_s(b, &self.base.mono(self.ring, c), y_cap)?;
                let coef = x * y;
                for (i, j, z) in s.terms() {
                    if self.base.has_level(a + i) && !(truncate && j + d > y_cap) {
                        out.add_term(a + i, j + d, &(z * &coef));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Populates cells for `m ≤ m_max` (and `j ≤ j_max` for graded families).
    pub fn extend(&mut self, m_max: usize, j_max: usize) -> Result<()> {
        if self.is_graded() {
            for m in 0..=m_max {
                if !self.base.has_level(m) {
                    break;
                }
                for j in 1..=j_max {
                    self.cell(j, m)?;
                }
            }
            Ok(())
        } else {
            self.fill_levels(m_max)
        }
    }

    /// The family of `τ∘s∘τ` in the mirrored convention: transposed q-matrix.
    pub fn flip_transpose(&self) -> Result<AlphaFamily> {
        if self.base != Base::PolyX {
            return Err(Error::Invalid("flip requires the polynomial base".into()));
        }
        AlphaFamily::from_q(Base::PolyX, &self.q_matrix().swap())
    }
}

fn unit_column(ring: RingDescriptor) -> Column {
    let mut c = BTreeMap::new();
    c.insert(1, Poly::one(ring));
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Verified,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Verified => write!(f, "Verified"),
            Status::Refuted => write!(f, "Refuted"),
            Status::Inconclusive => write!(f, "Inconclusive"),
        }
    }
}

/// The failing instance and the two unequal values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `α_j(1) ≠ δ_{j1}`.
    Unit { j: usize, value: Poly },
    /// `α_j(X^{u+v}) ≠ Σ_r α_r(X^u) γ_j^(r)(X^v)`.
    Split {
        j: usize,
        u: usize,
        v: usize,
        lhs: Poly,
        rhs: Poly,
    },
    /// `s(Y^{r1+r2}⊗X^k)` differs from `s(Y^{r1}⊗·)` applied to `s(Y^{r2}⊗X^k)`.
    YPower {
        r1: usize,
        r2: usize,
        k: usize,
        lhs: BiPoly,
        rhs: BiPoly,
    },
    /// `(m1 m2) m3 ≠ m1 (m2 m3)` on monomials given as `(x_deg, y_deg)`.
    Associativity {
        m1: (usize, usize),
        m2: (usize, usize),
        m3: (usize, usize),
        lhs: BiPoly,
        rhs: BiPoly,
    },
    /// A dual-number check on `Y^l`.
    Iota {
        check: String,
        l: usize,
        lhs: Poly,
        rhs: Poly,
    },
    /// A table cell outside its required ideal.
    Containment { j: usize, n: usize, value: Poly },
    /// A series cell with nonzero `α_0`.
    ZeroColumn { n: usize, value: Poly },
}

impl Witness {
    /// The `X`-degree (or `Y`-degree for dual checks) at which the failure sits.
    pub fn degree(&self) -> usize {
        match self {
            Witness::Unit { .. } => 0,
            Witness::Split { u, v, .. } => u + v,
            Witness::YPower { k, .. } => *k,
            Witness::Associativity { m1, m2, m3, .. } => m1.0 + m2.0 + m3.0,
            Witness::Iota { l, .. } => *l,
            Witness::Containment { n, .. } | Witness::ZeroColumn { n, .. } => *n,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Witness::Unit { j, value } => format!("alpha_{j}(1) = {value}"),
            Witness::Split { j, u, v, lhs, rhs } => format!(
                "alpha_{j}(X^{u}·X^{v}) = {lhs} but the split sum gives {rhs}"
            ),
            Witness::YPower { r1, r2, k, lhs, rhs } => {
                format!("s(Y^{r1}·Y^{r2} ⊗ X^{k}): {lhs} vs {rhs}")
            }
            Witness::Associativity { m1, m2, m3, lhs, rhs } => format!(
                "(X^{}Y^{} · X^{}Y^{}) · X^{}Y^{}: {lhs} vs {rhs}",
                m1.0, m1.1, m2.0, m2.1, m3.0, m3.1
            ),
            Witness::Iota { check, l, lhs, rhs } => format!("{check} on Y^{l}: {lhs} vs {rhs}"),
            Witness::Containment { j, n, value } => {
                format!("alpha_{j}(X^{n}) = {value} leaves the required ideal")
            }
            Witness::ZeroColumn { n, value } => format!("alpha_0(X^{n}) = {value}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub degree_bound: usize,
    pub status: Status,
    pub witness: Option<Witness>,
    /// `Some(cap)` when checks were made modulo `Y^{cap+1}`.
    pub y_truncation: Option<usize>,
    pub hypothesis: Option<String>,
    pub checks: usize,
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }

    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }
}

/// A single split instance to re-check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Focus {
    pub j: usize,
    pub u: usize,
    pub v: usize,
}

#[derive(Clone, Debug)]
pub struct VerifyParams {
    pub degree: usize,
    /// `Y`-degree cap for graded families without declared support;
    /// defaults to `degree`.
    pub y_cap: Option<usize>,
    pub focus: Option<Focus>,
    /// Monomial size (`x_deg + y_deg`) for the secondary checks.
    pub secondary_bound: usize,
}

impl VerifyParams {
    pub fn new(degree: usize) -> Self {
        VerifyParams {
            degree,
            y_cap: None,
            focus: None,
            secondary_bound: 2,
        }
    }
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self::new(10)
    }
}

/// `Σ_r α_r(X^u) γ_j^(r)(X^v)` for every `j` (graded: `j ≤ top`).
fn split_rhs(fam: &mut AlphaFamily, u: usize, v: usize, top: usize) -> Result<Column> {
    let mut rhs: Column = BTreeMap::new();
    if fam.is_graded() {
        for j in 0..=top {
            let mut acc = fam.zero();
            for r in 0..=j {
                let a = fam.cell(r, u)?;
                if a.is_zero() {
                    continue;
                }
                let g = fam.gamma_mono(j, r, v)?;
                if !g.is_zero() {
                    acc = &acc + &(&a * &g);
                }
            }
            let acc = fam.base.reduce(acc);
            if !acc.is_zero() {
                rhs.insert(j, acc);
            }
        }
    } else {
        fam.fill_levels(u)?;
        let col: Vec<(usize, Poly)> = fam
            .levels
            .get(&u)
            .map(|c| c.iter().map(|(&r, p)| (r, p.clone())).collect())
            .unwrap_or_default();
        for (r, a) in col {
            for (j, g) in fam.g_series(r, v, None)? {
                let e = rhs.entry(j).or_insert_with(|| Poly::zero(fam.ring));
                *e = &*e + &(&a * &g);
            }
        }
        for p in rhs.values_mut() {
            *p = fam.base.reduce(p.clone());
        }
        rhs.retain(|_, p| !p.is_zero());
    }
    Ok(rhs)
}

fn lhs_column(fam: &mut AlphaFamily, m: usize, top: usize) -> Result<Column> {
    let mut out = BTreeMap::new();
    if !fam.base.has_level(m) {
        return Ok(out);
    }
    if fam.is_graded() {
        for j in 0..=top {
            let p = fam.cell(j, m)?;
            if !p.is_zero() {
                out.insert(j, p);
            }
        }
    } else {
        fam.fill_levels(m)?;
        if let Some(c) = fam.levels.get(&m) {
            for (&j, p) in c {
                if !p.is_zero() {
                    out.insert(j, p.clone());
                }
            }
        }
    }
    Ok(out)
}

/// Exact check of the twisting-map axioms on monomials up to total degree
/// `params.degree`. Failures come back as `Refuted` with a witness.
pub fn verify_axioms(fam: &AlphaFamily, params: &VerifyParams) -> VerificationReport {
    let mut work = fam.clone();
    let y_cap = params.y_cap.unwrap_or(params.degree);
    let graded = work.is_graded();
    let top = match work.y_limit {
        Some(l) => l.max(l * l),
        None => y_cap,
    };
    let y_truncation = (graded && work.y_limit.is_none()).then_some(y_cap);
    let mut report = VerificationReport {
        degree_bound: params.degree,
        status: Status::Verified,
        witness: None,
        y_truncation,
        hypothesis: work.hypothesis.clone(),
        checks: 0,
        note: None,
    };
    match run_checks(&mut work, params, top, y_cap, &mut report.checks) {
        Ok(None) => {}
        Ok(Some(w)) => {
            report.status = Status::Refuted;
            report.witness = Some(w);
        }
        Err(e) => {
            report.status = Status::Inconclusive;
            report.note = Some(e.to_string());
        }
    }
    report
}

fn run_checks(
    fam: &mut AlphaFamily,
    params: &VerifyParams,
    top: usize,
    y_cap: usize,
    checks: &mut usize,
) -> Result<Option<Witness>> {
    if let Some(f) = params.focus {
        return check_split(fam, f.u, f.v, top, Some(f.j), checks);
    }
    let one = Poly::one(fam.ring);
    let units: Vec<usize> = fam
        .levels
        .get(&0)
        .map(|c| c.keys().copied().collect())
        .unwrap_or_default();
    for j in units.into_iter().chain(std::iter::once(1)) {
        *checks += 1;
        let v = fam.cell(j, 0)?;
        let expected = if j == 1 { one.clone() } else { fam.zero() };
        if v != expected {
            return Ok(Some(Witness::Unit { j, value: v }));
        }
    }
    for total in 2..=params.degree {
        for u in 1..total {
            let v = total - u;
            if !fam.base.has_level(u) || !fam.base.has_level(v) {
                continue;
            }
            if let Some(w) = check_split(fam, u, v, top, None, checks)? {
                return Ok(Some(w));
            }
        }
    }
    secondary_checks(fam, params, y_cap, checks)
}

fn check_split(
    fam: &mut AlphaFamily,
    u: usize,
    v: usize,
    top: usize,
    only_j: Option<usize>,
    checks: &mut usize,
) -> Result<Option<Witness>> {
    let lhs = lhs_column(fam, u + v, top)?;
    let rhs = split_rhs(fam, u, v, top)?;
    let mut js: Vec<usize> = lhs.keys().chain(rhs.keys()).copied().collect();
    js.sort_unstable();
    js.dedup();
    if let Some(j) = only_j {
        js = vec![j];
    }
    for j in js {
        *checks += 1;
        let l = lhs.get(&j).cloned().unwrap_or_else(|| fam.zero());
        let r = rhs.get(&j).cloned().unwrap_or_else(|| fam.zero());
        if l != r {
            return Ok(Some(Witness::Split {
                j,
                u,
                v,
                lhs: l,
                rhs: r,
            }));
        }
    }
    Ok(None)
}

fn secondary_checks(
    fam: &mut AlphaFamily,
    params: &VerifyParams,
    y_cap: usize,
    checks: &mut usize,
) -> Result<Option<Witness>> {
    let b = params.secondary_bound.min(params.degree);
    let ring = fam.ring;
    let truncate = fam.is_graded() && fam.y_limit.is_none();
    // Y-multiplicativity: s(Y^{r1+r2}⊗X^k) = (s(Y^{r1}⊗·)⊗Y)(s(Y^{r2}⊗X^k)).
    for r1 in 1..=b {
        for r2 in 1..=b {
            for k in 0..=b {
                if !fam.base.has_level(k) {
                    continue;
                }
                *checks += 1;
                let x = fam.base.mono(ring, k);
                let lhs = fam.eval_s(r1 + r2, &x, y_cap)?;
                let inner = fam.eval_s(r2, &x, y_cap)?;
                let mut rhs = BiPoly::zero(ring);
                for j in 0..=inner.max_y_degree().unwrap_or(0) {
                    let slice = inner.y_slice(j);
                    if slice.is_zero() {
                        continue;
                    }
                    let outer = fam.eval_s(r1, &slice, y_cap)?;
                    for (i, jj, c) in outer.terms() {
                        if !(truncate && jj + j > y_cap) {
                            rhs.add_term(i, jj + j, c);
                        }
                    }
                }
                let lhs = if truncate { lhs.truncate_y(y_cap) } else { lhs };
                if lhs != rhs {
                    return Ok(Some(Witness::YPower { r1, r2, k, lhs, rhs }));
                }
            }
        }
    }
    // Associativity of the twisted product on small monomials.
    let monos: Vec<(usize, usize)> = (0..=b)
        .flat_map(|s| (0..=s).map(move |a| (a, s - a)))
        .filter(|&(a, _)| fam.base.has_level(a))
        .collect();
    let one = RingValue::one(ring);
    let as_bi = |m: (usize, usize)| BiPoly::monomial(one.clone(), m.0, m.1);
    for &m1 in &monos {
        for &m2 in &monos {
            let p12 = fam.mul_twisted(&as_bi(m1), &as_bi(m2), y_cap)?;
            for &m3 in &monos {
                *checks += 1;
                let lhs = fam.mul_twisted(&p12, &as_bi(m3), y_cap)?;
                let p23 = fam.mul_twisted(&as_bi(m2), &as_bi(m3), y_cap)?;
                let rhs = fam.mul_twisted(&as_bi(m1), &p23, y_cap)?;
                if lhs != rhs {
                    return Ok(Some(Witness::Associativity { m1, m2, m3, lhs, rhs }));
                }
            }
        }
    }
    Ok(None)
}

/// Re-runs the check named by `witness`; true when the same unequal pair
/// of values is reproduced.
pub fn replay(fam: &AlphaFamily, witness: &Witness, params: &VerifyParams) -> Result<bool> {
    match witness {
        Witness::Split { j, u, v, lhs, rhs } => {
            let mut p = params.clone();
            p.focus = Some(Focus {
                j: *j,
                u: *u,
                v: *v,
            });
            let r = verify_axioms(fam, &p);
            Ok(match r.witness {
                Some(Witness::Split {
                    lhs: l2, rhs: r2, ..
                }) => &l2 == lhs && &r2 == rhs && l2 != r2,
                _ => false,
            })
        }
        Witness::Unit { j, value } => {
            let mut w = fam.clone();
            let v = w.cell(*j, 0)?;
            let expected = if *j == 1 {
                Poly::one(fam.ring)
            } else {
                Poly::zero(fam.ring)
            };
            Ok(&v == value && v != expected)
        }
        _ => {
            let r = verify_axioms(fam, params);
            Ok(r.witness.as_ref() == Some(witness))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Boundedness {
    /// `α_n = 0` for `n ≥ n0` on every inspected level.
    UpperBounded { n0: usize },
    /// The support of `α_•(X^level)` reaches column `j` and keeps growing.
    NotUpperBounded { level: usize, j: usize },
    Inconclusive(String),
}

/// Inspects `n_max(m) = max{j : α_j(X^m) ≠ 0}` for `m ≤ search_bound`.
/// The verdict is `UpperBounded` when `n_max` stops growing over the second
/// half of the levels and stays below half the column cap `search_bound·J`.
pub fn is_upper_bounded(fam: &AlphaFamily, search_bound: usize) -> Boundedness {
    let mut work = fam.clone();
    let big_j = work.generator_support().unwrap_or(0).max(1);
    let cap = search_bound.max(1) * big_j;
    let mut maxima: Vec<Option<usize>> = Vec::new();
    for m in 0..=search_bound {
        if !work.base.has_level(m) {
            break;
        }
        let col = if work.is_graded() {
            let mut best = None;
            for j in 1..=cap {
                match work.cell(j, m) {
                    Ok(p) if !p.is_zero() => best = Some(j),
                    Ok(_) => {}
                    Err(e) => return Boundedness::Inconclusive(e.to_string()),
                }
            }
            best
        } else {
            match lhs_column(&mut work, m, cap) {
                Ok(c) => c.keys().next_back().copied(),
                Err(e) => return Boundedness::Inconclusive(e.to_string()),
            }
        };
        if let Some(j) = col {
            if j >= cap {
                return Boundedness::NotUpperBounded { level: m, j };
            }
        }
        maxima.push(col);
    }
    if let Some((level, &Some(j))) = maxima
        .iter()
        .enumerate()
        .find(|(_, x)| x.is_some_and(|j| 2 * j > cap))
    {
        return Boundedness::NotUpperBounded { level, j };
    }
    let half = maxima.len().div_ceil(2);
    let first = maxima[..half].iter().flatten().max().copied();
    let all = maxima.iter().flatten().max().copied();
    if all == first {
        Boundedness::UpperBounded {
            n0: all.map_or(0, |x| x + 1),
        }
    } else {
        let level = maxima
            .iter()
            .position(|x| x.is_some() && *x == all)
            .unwrap_or(0);
        Boundedness::NotUpperBounded {
            level,
            j: all.unwrap_or(0),
        }
    }
}

/// Lower boundedness: upper boundedness of the flipped family.
pub fn is_lower_bounded(fam: &AlphaFamily, search_bound: usize) -> Boundedness {
    match fam.flip_transpose() {
        Ok(f) => is_upper_bounded(&f, search_bound),
        Err(e) => Boundedness::Inconclusive(e.to_string()),
    }
}

/// All compositions of `j` into `r` parts drawn from `0..=max_part`
/// (`min_part` is 0 or 1).
pub fn compositions(j: usize, r: usize, min_part: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return if j == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in min_part..=j {
        for mut rest in compositions(j - first, r - 1, min_part) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `γ_j^(r)(X^k)` as the literal sum over compositions `α_{n1}∘…∘α_{nr}`.
pub fn gamma_brute_force(fam: &mut AlphaFamily, j: usize, r: usize, k: usize) -> Result<Poly> {
    let min_part = usize::from(fam.is_graded());
    let mut acc = Poly::zero(fam.ring);
    for comp in compositions(j, r, min_part) {
        let mut p = fam.base.mono(fam.ring, k);
        for &n in comp.iter().rev() {
            p = fam.apply(n, &p)?;
        }
        acc = &acc + &p;
    }
    Ok(acc)
}
