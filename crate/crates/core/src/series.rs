//! Twisting maps `k[[Y]] ⊗ k[[X]] → k[[X]] ⊗ k[[Y]]` with `α_0 = 0`, modelled
//! by working modulo `X^{nx}` and `Y^{ny}`.
//!
//! Values carry the precision to which they are known. Applying `α_l` to a
//! series known modulo `X^p` gives a result known modulo `X^{p - loss(l)}`,
//! where `loss(l) = max(0, l + e - 2)` and `e` is the nilpotency index of
//! `a_01` (zero loss when row 0 of the matrix vanishes). Tables are built at a
//! working precision large enough that everything reported is exact modulo
//! `X^{nx}`.

use std::collections::BTreeMap;

use crate::builders::{tower_value, validated_betas, DerivSpec, EndoSpec};
use crate::error::{Error, Result};
use crate::poly::{BiPoly, Poly};
use crate::ring::{RingDescriptor, RingValue};
use crate::twist::{Base, Status, VerificationReport, Witness};

/// A series known modulo `X^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approx {
    pub value: Poly,
    pub prec: usize,
}

impl Approx {
    pub fn new(value: Poly, prec: usize) -> Self {
        Approx {
            value: value.truncate(prec),
            prec,
        }
    }

    fn zero(ring: RingDescriptor, prec: usize) -> Self {
        Approx {
            value: Poly::zero(ring),
            prec,
        }
    }

    /// Lower bound for the `X`-adic order.
    pub fn order(&self) -> usize {
        self.value.valuation().unwrap_or(self.prec).min(self.prec)
    }

    fn add(&self, o: &Approx) -> Approx {
        Approx::new(&self.value + &o.value, self.prec.min(o.prec))
    }

    fn mul(&self, o: &Approx) -> Approx {
        let prec = (self.prec + o.order()).min(o.prec + self.order());
        Approx::new(&self.value * &o.value, prec)
    }
}

/// A family built from `s(Y⊗X) = Σ a_ij X^i⊗Y^j`, stored to `(nx, ny)`.
#[derive(Clone, Debug)]
pub struct TruncatedAlphaFamily {
    ring: RingDescriptor,
    a: BiPoly,
    nx: usize,
    ny: usize,
    nilpotency: u32,
    row0_zero: bool,
    work: usize,
    /// `(j, n) → α_j(X^n)` for `1 ≤ j < ny`, `n < work`.
    cells: BTreeMap<(usize, usize), Approx>,
    provenance: Vec<String>,
}

impl TruncatedAlphaFamily {
    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// The defining matrix, reduced to `(nx, ny)`.
    pub fn matrix(&self) -> &BiPoly {
        &self.a
    }

    pub fn nilpotency_index(&self) -> u32 {
        self.nilpotency
    }

    pub fn working_precision(&self) -> usize {
        self.work
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    fn loss(&self, l: usize) -> usize {
        if self.row0_zero {
            0
        } else {
            (l + self.nilpotency as usize).saturating_sub(2)
        }
    }

    /// `α_j(X^n)` modulo `X^{nx}`.
    pub fn cell(&self, j: usize, n: usize) -> Result<Poly> {
        if j == 0 {
            return Ok(Poly::zero(self.ring));
        }
        self.cells
            .get(&(j, n))
            .map(|c| c.value.truncate(self.nx))
            .ok_or(Error::ExtendFirst { j, m: n })
    }

    /// Nonzero cells `α_j(X^n)` for `j < ny`, `n < nx`, modulo `X^{nx}`.
    pub fn table(&self) -> BTreeMap<(usize, usize), Poly> {
        self.cells
            .iter()
            .filter(|((_, n), _)| *n < self.nx)
            .map(|(&k, c)| (k, c.value.truncate(self.nx)))
            .filter(|(_, p)| !p.is_zero())
            .collect()
    }

    /// Overwrites one cell, keeping its precision; used for corruption tests.
    pub fn set_cell(&mut self, j: usize, n: usize, p: Poly) {
        if let Some(c) = self.cells.get_mut(&(j, n)) {
            c.value = p.truncate(c.prec);
        }
    }

    /// `α_l(P)`.
    pub fn apply(&self, l: usize, p: &Approx) -> Result<Approx> {
        if l == 0 {
            return Ok(Approx::zero(self.ring, self.work));
        }
        let mut prec = p.prec.saturating_sub(self.loss(l));
        let mut acc = Poly::zero(self.ring);
        for (k, c) in p.value.terms() {
            let cell = self.cells.get(&(l, k)).ok_or(Error::ExtendFirst { j: l, m: k })?;
            prec = prec.min(cell.prec);
            acc.add_scaled(&cell.value, c);
        }
        Ok(Approx::new(acc, prec))
    }

    /// `g[r][j] = γ_j^(r)(P)` for `r, j < top`.
    pub fn gamma_table(&self, p: &Approx, top: usize) -> Result<Vec<Vec<Approx>>> {
        let zero = Approx::zero(self.ring, self.work);
        let mut g = vec![vec![zero.clone(); top]; top];
        if top == 0 {
            return Ok(g);
        }
        g[0][0] = p.clone();
        for r in 1..top {
            for j in r..top {
                let mut acc = zero.clone();
                for l in 1..=j + 1 - r {
                    let prev = &g[r - 1][j - l];
                    if prev.value.is_zero() && prev.prec >= self.work {
                        continue;
                    }
                    acc = acc.add(&self.apply(l, prev)?);
                }
                g[r][j] = acc;
            }
        }
        Ok(g)
    }

    /// Containment: `α_j(X^n) ∈ Σ_{r ≤ n-j+1} a_01^{n-j-r+1} X^r k[[X]]`
    /// for `n ≥ j`, checked on every stored cell below `X^{nx}`.
    pub fn check_containment(&self) -> Option<Witness> {
        let a01 = self.a.coeff(0, 1);
        for (&(j, n), c) in &self.cells {
            if n < j || n >= self.nx {
                continue;
            }
            for r in 0..=(n - j).min(self.nx.saturating_sub(1)) {
                let coef = c.value.coeff(r);
                let gen = a01.pow((n - j - r + 1) as u64);
                if !coef.in_ideal(&gen) {
                    return Some(Witness::Containment {
                        j,
                        n,
                        value: c.value.truncate(self.nx),
                    });
                }
            }
        }
        None
    }
}

fn check_matrix(a: &BiPoly) -> Result<u32> {
    if let Some((i, _, c)) = a.terms().find(|&(_, j, _)| j == 0) {
        return Err(Error::NonzeroColumnZero {
            i,
            value: c.to_string(),
        });
    }
    let a01 = a.coeff(0, 1);
    a01.nilpotency_index()
        .ok_or_else(|| Error::NonNilpotentConstant(a01.to_string()))
}

const MAX_WORK: usize = 4096;

/// The unique family with `α_0 = 0` and `α_j(X) = Σ_i a_ij X^i`, for `a`
/// with vanishing column 0 and nilpotent `a_01`, built by
/// `α_j(X^{n+1}) = Σ_{r=1}^j α_r(X^n) γ_j^(r)(X)`.
pub fn build_series(a: &BiPoly, nx: usize, ny: usize) -> Result<TruncatedAlphaFamily> {
    if nx == 0 || ny == 0 {
        return Err(Error::ZeroOrder);
    }
    let e = check_matrix(a)?;
    let reduced = BiPoly::from_terms(
        a.ring(),
        a.terms()
            .filter(|&(i, j, _)| i < nx && j < ny)
            .map(|(i, j, c)| (i, j, c.clone())),
    );
    let row0_zero = a.terms().all(|(i, _, _)| i > 0);
    // A chain of applications inside γ_j^(r) loses at most j(e-1) digits.
    let mut work = if row0_zero { nx + 2 } else { nx + ny * e as usize + 2 };
    loop {
        let fam = build_at(a, &reduced, nx, ny, e, row0_zero, work)?;
        let (cells_ok, gamma_ok) = precision_reached(&fam)?;
        if cells_ok && gamma_ok {
            if let Some(w) = fam.check_containment() {
                return Err(Error::InternalMismatch(format!(
                    "containment fails: {}",
                    w.describe()
                )));
            }
            return Ok(fam);
        }
        work *= 2;
        if work > MAX_WORK {
            return Err(Error::ResourceLimit(format!(
                "working precision above {MAX_WORK} needed for ({nx}, {ny})"
            )));
        }
    }
}

fn build_at(
    a: &BiPoly,
    reduced: &BiPoly,
    nx: usize,
    ny: usize,
    e: u32,
    row0_zero: bool,
    work: usize,
) -> Result<TruncatedAlphaFamily> {
    let ring = a.ring();
    let mut fam = TruncatedAlphaFamily {
        ring,
        a: reduced.clone(),
        nx,
        ny,
        nilpotency: e,
        row0_zero,
        work,
        cells: BTreeMap::new(),
        provenance: vec![format!(
            "series family: a_01 nilpotency index {e}, working precision {work}"
        )],
    };
    let col = |j: usize| Approx::new(a.y_slice(j), work);
    if ny <= 1 {
        return Ok(fam);
    }
    let x1 = col(1);
    let mut pw = Approx::new(Poly::one(ring), work);
    for n in 0..work {
        fam.cells.insert((1, n), pw.clone());
        pw = pw.mul(&x1);
    }
    // g[r][j] = γ_j^(r)(X), grown one column at a time.
    let zero = Approx::zero(ring, work);
    let mut g: Vec<Vec<Approx>> = vec![vec![zero.clone(); ny]; ny];
    g[1][1] = x1;
    for j in 2..ny {
        g[1][j] = col(j);
        for r in 2..=j {
            let mut acc = zero.clone();
            for l in 1..=j + 1 - r {
                acc = acc.add(&fam.apply(l, &g[r - 1][j - l])?);
            }
            g[r][j] = acc;
        }
        fam.cells.insert((j, 0), zero.clone());
        fam.cells.insert((j, 1), g[1][j].clone());
        for n in 1..work - 1 {
            let mut acc = zero.clone();
            for (r, gr) in g.iter().enumerate().take(j + 1).skip(1) {
                acc = acc.add(&fam.cells[&(r, n)].mul(&gr[j]));
            }
            fam.cells.insert((j, n + 1), acc);
        }
    }
    Ok(fam)
}

fn precision_reached(fam: &TruncatedAlphaFamily) -> Result<(bool, bool)> {
    let cells_ok = fam
        .cells
        .iter()
        .filter(|((_, n), _)| *n <= fam.nx)
        .all(|(_, c)| c.prec >= fam.nx);
    let mut gamma_ok = true;
    for v in 0..=fam.nx.min(fam.work - 1) {
        let x = Approx::new(Poly::monomial(RingValue::one(fam.ring), v), fam.work);
        let g = fam.gamma_table(&x, fam.ny)?;
        gamma_ok &= g.iter().flatten().all(|c| c.prec >= fam.nx);
        if !gamma_ok {
            break;
        }
    }
    Ok((cells_ok, gamma_ok))
}

/// Checks `α_j(1) = δ_{j1}`, the order bound that makes each `α_j`
/// continuous, and `α_j(X^u X^v) = Σ_r α_r(X^u) γ_j^(r)(X^v)` for
/// `u + v ≤ nx`, `j < ny`, modulo `X^{nx}`. The power condition on `α_0` holds
/// trivially since `α_0 = 0`.
pub fn verify_series(fam: &TruncatedAlphaFamily, nx: usize, ny: usize) -> VerificationReport {
    let mut report = VerificationReport {
        degree_bound: nx,
        status: Status::Verified,
        witness: None,
        y_truncation: Some(ny.saturating_sub(1)),
        hypothesis: None,
        checks: 0,
        note: Some("alpha_0 = 0, so the power condition on alpha_0 holds".into()),
    };
    if nx > fam.nx || ny > fam.ny {
        report.status = Status::Inconclusive;
        report.note = Some(format!(
            "family is stored to ({}, {}); rebuild to check ({nx}, {ny})",
            fam.nx, fam.ny
        ));
        return report;
    }
    match run_series_checks(fam, nx, ny, &mut report.checks) {
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

fn run_series_checks(
    fam: &TruncatedAlphaFamily,
    nx: usize,
    ny: usize,
    checks: &mut usize,
) -> Result<Option<Witness>> {
    let ring = fam.ring;
    for j in 1..ny {
        *checks += 1;
        let v = fam.cell(j, 0)?.truncate(nx);
        let want = if j == 1 { Poly::one(ring) } else { Poly::zero(ring) };
        if v != want {
            return Ok(Some(Witness::Unit { j, value: v }));
        }
    }
    for (&(j, n), c) in &fam.cells {
        if n >= nx || j >= ny {
            continue;
        }
        *checks += 1;
        let bound = n.saturating_sub(fam.loss(j));
        if c.value.truncate(nx).valuation().is_some_and(|o| o < bound) {
            return Ok(Some(Witness::Containment {
                j,
                n,
                value: c.value.truncate(nx),
            }));
        }
    }
    for total in 0..=nx.min(fam.work - 1) {
        for v in 0..=total {
            let u = total - v;
            let x = Approx::new(Poly::monomial(RingValue::one(ring), v), fam.work);
            let g = fam.gamma_table(&x, ny)?;
            for j in 1..ny {
                *checks += 1;
                if let Some(w) = split_mismatch(fam, &g, j, u, v, nx)? {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

fn split_mismatch(
    fam: &TruncatedAlphaFamily,
    g: &[Vec<Approx>],
    j: usize,
    u: usize,
    v: usize,
    nx: usize,
) -> Result<Option<Witness>> {
    let lhs = fam
        .cells
        .get(&(j, u + v))
        .ok_or(Error::ExtendFirst { j, m: u + v })?;
    let mut rhs = Approx::zero(fam.ring, fam.work);
    for (r, gr) in g.iter().enumerate().take(j + 1).skip(1) {
        let a = fam.cells.get(&(r, u)).ok_or(Error::ExtendFirst { j: r, m: u })?;
        rhs = rhs.add(&a.mul(&gr[j]));
    }
    let p = nx.min(lhs.prec).min(rhs.prec);
    if p < nx {
        return Err(Error::ResourceLimit(format!(
            "only precision {p} reached at (j={j}, u={u}, v={v})"
        )));
    }
    let (l, r) = (lhs.value.truncate(p), rhs.value.truncate(p));
    Ok((l != r).then_some(Witness::Split {
        j,
        u,
        v,
        lhs: l,
        rhs: r,
    }))
}

/// Re-runs the single check a witness describes; `true` means it still fails.
pub fn replay_series(fam: &TruncatedAlphaFamily, witness: &Witness) -> Result<bool> {
    let nx = fam.nx;
    match witness {
        Witness::Unit { j, .. } => {
            let want = if *j == 1 { Poly::one(fam.ring) } else { Poly::zero(fam.ring) };
            Ok(fam.cell(*j, 0)? != want)
        }
        Witness::Split { j, u, v, .. } => {
            let x = Approx::new(Poly::monomial(RingValue::one(fam.ring), *v), fam.work);
            let g = fam.gamma_table(&x, fam.ny)?;
            Ok(split_mismatch(fam, &g, *j, *u, *v, nx)?.is_some())
        }
        Witness::Containment { j, n, .. } => {
            let c = fam.cell(*j, *n)?;
            Ok(c.valuation().is_some_and(|o| o < n.saturating_sub(fam.loss(*j))))
        }
        _ => Err(Error::Invalid("witness does not come from a series check".into())),
    }
}

/// `s(Σ_r Y^r ⊗ a_r) = Σ_j (Σ_r γ_j^(r)(a_r)) ⊗ Y^j` modulo `(X^{nx}, Y^{ny})`.
pub fn eval_s_series(
    fam: &TruncatedAlphaFamily,
    terms: &[(usize, Poly)],
    ny: usize,
) -> Result<BiPoly> {
    if ny > fam.ny {
        return Err(Error::ExtendFirst { j: ny, m: 0 });
    }
    let mut out = BiPoly::zero(fam.ring);
    for (r, a) in terms {
        if *r >= ny {
            continue;
        }
        if let Some(d) = a.degree().finite() {
            if d >= fam.work {
                return Err(Error::ExtendFirst { j: 1, m: d });
            }
        }
        let g = fam.gamma_table(&Approx::new(a.clone(), fam.work), ny)?;
        for (j, gj) in g[*r].iter().enumerate().skip(*r) {
            if gj.prec < fam.nx {
                return Err(Error::ResourceLimit(format!(
                    "only precision {} reached for gamma_{j}^({r})",
                    gj.prec
                )));
            }
            out = &out + &BiPoly::from_x_poly(&gj.value.truncate(fam.nx), j);
        }
    }
    Ok(out)
}

/// The flip of the map with `s(X⊗Y) = Σ a_ij Y^j⊗X^i`: requires `a_0j = 0`
/// for all `j` and `a_10` nilpotent, and builds the family of the transpose
/// (so the roles of `nx` and `ny` swap).
pub fn flip_series(a: &BiPoly, nx: usize, ny: usize) -> Result<TruncatedAlphaFamily> {
    if let Some((_, j, c)) = a.terms().find(|&(i, _, _)| i == 0) {
        return Err(Error::NonzeroColumnZero {
            i: j,
            value: c.to_string(),
        });
    }
    let mut fam = build_series(&a.swap(), ny, nx)?;
    fam.provenance.push("flip of the transposed matrix".into());
    Ok(fam)
}

/// Derivation tower `α_1 = α`, `α_j = Σ β_w` over words of weight `j - 1`,
/// on `k[[t]]` modulo `t^n` and `Y^{ny}`. No finiteness is required of the
/// words; the `Y` truncation stands in for completeness. `α` and each `β_i`
/// must map `t` into `t·k[[t]]`.
pub fn build_series_tower(
    alpha: &EndoSpec,
    betas: &BTreeMap<usize, DerivSpec>,
    ny: usize,
    bound: usize,
) -> Result<TruncatedAlphaFamily> {
    let Base::Quot(n) = alpha.base() else {
        return Err(Error::Invalid("series towers live on k[[t]] modulo t^n".into()));
    };
    let ring = alpha.ring();
    if !alpha.image().coeff(0).is_zero()
        || betas.values().any(|b| !b.image().coeff(0).is_zero())
    {
        return Err(Error::Hypothesis(
            "alpha and the derivations must map t into t·k[[t]]".into(),
        ));
    }
    let betas = validated_betas(alpha, betas, bound)?;
    let mut tables = BTreeMap::new();
    for m in 0..n {
        let x = Poly::monomial(RingValue::one(ring), m);
        for j in 1..ny {
            let v = if j == 1 {
                alpha.apply(&x)
            } else {
                tower_value(alpha, &betas, j, &x)?
            };
            if !v.is_zero() {
                tables.insert((j, m), v);
            }
        }
    }
    let a = BiPoly::from_terms(
        ring,
        tables
            .iter()
            .filter(|((_, m), _)| *m == 1)
            .flat_map(|(&(j, _), p)| p.terms().map(move |(i, c)| (i, j, c.clone())))
            .collect::<Vec<_>>(),
    );
    let mut fam = build_series(&a, n, ny)?;
    if fam.table() != tables {
        return Err(Error::InternalMismatch(
            "tower tables disagree with the recursion from the generator".into(),
        ));
    }
    fam.provenance.push(format!(
        "series derivation tower on k[[t]]/(t^{n}); orthogonality checked to {bound}"
    ));
    Ok(fam)
}
