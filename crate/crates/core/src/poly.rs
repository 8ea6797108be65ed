//! Univariate polynomials, truncated polynomials and bivariate `X⊗Y` polynomials.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::{binomial_in, RingDescriptor, RingValue};

/// Degree of a polynomial; the zero polynomial has degree `NegInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInf,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Sparse polynomial in one variable; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    ring: RingDescriptor,
    coeffs: BTreeMap<usize, RingValue>,
}

impl Poly {
    pub fn zero(ring: RingDescriptor) -> Self {
        Poly {
            ring,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(ring: RingDescriptor) -> Self {
        Self::monomial(RingValue::one(ring), 0)
    }

    pub fn constant(c: RingValue) -> Self {
        Self::monomial(c, 0)
    }

    /// The variable itself.
    pub fn var(ring: RingDescriptor) -> Self {
        Self::monomial(RingValue::one(ring), 1)
    }

    pub fn monomial(c: RingValue, deg: usize) -> Self {
        let mut p = Poly::zero(c.ring());
        if !c.is_zero() {
            p.coeffs.insert(deg, c);
        }
        p
    }

    /// Builds from `(degree, coefficient)` pairs, summing repeated degrees.
    pub fn from_terms<I: IntoIterator<Item = (usize, RingValue)>>(
        ring: RingDescriptor,
        terms: I,
    ) -> Self {
        let mut p = Poly::zero(ring);
        for (d, c) in terms {
            p.add_term(d, &c);
        }
        p
    }

    /// Dense integer coefficients, lowest degree first.
    pub fn from_i64s(ring: RingDescriptor, dense: &[i64]) -> Self {
        Self::from_terms(
            ring,
            dense
                .iter()
                .enumerate()
                .map(|(d, &c)| (d, RingValue::from_i64(ring, c))),
        )
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.keys().next_back() {
            Some(&d) => Degree::Finite(d),
            None => Degree::NegInf,
        }
    }

    /// Lowest degree carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.keys().next().copied()
    }

    pub fn coeff(&self, deg: usize) -> RingValue {
        self.coeffs
            .get(&deg)
            .cloned()
            .unwrap_or_else(|| RingValue::zero(self.ring))
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (usize, &RingValue)> + '_ {
        self.coeffs.iter().map(|(&d, c)| (d, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Adds `c·Z^deg` in place.
    pub fn add_term(&mut self, deg: usize, c: &RingValue) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&deg) {
            Some(v) => {
                let s = &*v + c;
                if s.is_zero() {
                    self.coeffs.remove(&deg);
                } else {
                    *v = s;
                }
            }
            None => {
                self.coeffs.insert(deg, c.clone());
            }
        }
    }

    /// Adds `c·q` in place.
    pub fn add_scaled(&mut self, q: &Poly, c: &RingValue) {
        if c.is_zero() {
            return;
        }
        for (d, v) in q.terms() {
            self.add_term(d, &(v * c));
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut out = self.clone();
        for (d, c) in other.terms() {
            out.add_term(d, c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut out = Poly::zero(self.ring);
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_term(a + b, &(x * y));
            }
        }
        Ok(out)
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                left: self.ring,
                right: other.ring,
            });
        }
        Ok(())
    }

    pub fn scalar_mul(&self, c: &RingValue) -> Poly {
        let mut out = Poly::zero(self.ring);
        out.add_scaled(self, c);
        out
    }

    /// Multiplies by `Z^k`.
    pub fn shift_degree(&self, k: usize) -> Poly {
        Poly {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|(&d, c)| (d + k, c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.ring);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Drops every term of degree `>= n`.
    pub fn truncate(&self, n: usize) -> Poly {
        Poly {
            ring: self.ring,
            coeffs: self.coeffs.range(..n).map(|(&d, c)| (d, c.clone())).collect(),
        }
    }

    pub fn eval(&self, c: &RingValue) -> RingValue {
        // Horner from the top degree down.
        let mut acc = RingValue::zero(self.ring);
        let mut prev: Option<usize> = None;
        for (d, v) in self.terms().rev() {
            if let Some(p) = prev {
                acc = &acc * &c.pow((p - d) as u64);
            }
            acc = &acc + v;
            prev = Some(d);
        }
        if let Some(p) = prev {
            acc = &acc * &c.pow(p as u64);
        }
        acc
    }

    /// Substitutes `q` for the variable.
    pub fn compose(&self, q: &Poly) -> Poly {
        let mut out = Poly::zero(self.ring);
        let mut power = Poly::one(self.ring);
        let mut at = 0usize;
        for (d, c) in self.terms() {
            while at < d {
                power = &power * q;
                at += 1;
            }
            out.add_scaled(&power, c);
        }
        out
    }

    pub fn formal_derivative(&self) -> Poly {
        Poly::from_terms(
            self.ring,
            self.terms()
                .filter(|(d, _)| *d > 0)
                .map(|(d, c)| (d - 1, c.scale_int(&BigInt::from(d)))),
        )
    }

    /// `p(c) = 0` and `p'(c) = 0`; the zero polynomial qualifies at every point.
    pub fn is_multiple_root(&self, c: &RingValue) -> bool {
        self.eval(c).is_zero() && self.formal_derivative().eval(c).is_zero()
    }

    /// `p(Z + c)` expanded with binomial coefficients.
    pub fn shift_substitute(&self, c: &RingValue) -> Poly {
        let mut out = Poly::zero(self.ring);
        for (k, v) in self.terms() {
            for i in 0..=k {
                let coef = v * &binomial_in(self.ring, k as u64, i as i64) * c.pow((k - i) as u64);
                out.add_term(i, &coef);
            }
        }
        out
    }

    /// All roots in the coefficient ring, found among `±p/q` with `p` dividing
    /// the lowest and `q` the leading coefficient of the primitive integer form.
    pub fn rational_root_candidates(&self) -> Result<Vec<RingValue>> {
        if !self.ring.is_rational() {
            return Err(Error::UnsupportedRing(self.ring));
        }
        if self.is_zero() {
            return Err(Error::InfiniteRootSet);
        }
        let ints = self.primitive_integer_form();
        let low = ints.keys().next().copied().unwrap_or(0);
        let mut roots: BTreeSet<BigRational> = BTreeSet::new();
        if low > 0 {
            roots.insert(BigRational::zero());
        }
        let a0 = ints[&low].abs();
        let an = ints.values().next_back().expect("nonzero").abs();
        if ints.len() > 1 {
            for p in divisors(&a0) {
                for q in divisors(&an) {
                    for sign in [1i32, -1] {
                        let cand = BigRational::new(p.clone() * sign, q.clone());
                        if let Ok(v) = RingValue::from_rational(self.ring, &cand) {
                            if self.eval(&v).is_zero() {
                                roots.insert(cand);
                            }
                        }
                    }
                }
            }
        }
        Ok(roots
            .into_iter()
            .filter_map(|r| RingValue::from_rational(self.ring, &r).ok())
            .collect())
    }

    /// Integer coefficients of a positive multiple of `self` with content 1.
    fn primitive_integer_form(&self) -> BTreeMap<usize, BigInt> {
        let rats: Vec<(usize, BigRational)> = self
            .terms()
            .map(|(d, c)| (d, c.to_rational().expect("rational ring")))
            .collect();
        let lcm = rats
            .iter()
            .fold(BigInt::one(), |acc, (_, r)| acc.lcm(r.denom()));
        let ints: Vec<(usize, BigInt)> = rats
            .into_iter()
            .map(|(d, r)| (d, (r * BigRational::from_integer(lcm.clone())).to_integer()))
            .collect();
        let g = ints
            .iter()
            .fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
        ints.into_iter().map(|(d, v)| (d, v / &g)).collect()
    }

    /// Parses expressions such as `"3/2*Y^3 - Y + 1"` in a single variable.
    ///
    /// Any single ASCII letter is accepted as the variable name.
    pub fn parse(ring: RingDescriptor, input: &str) -> Result<Poly> {
        let bad = || Error::Parse {
            what: "polynomial",
            input: input.to_string(),
        };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad());
        }
        let mut var: Option<char> = None;
        let mut out = Poly::zero(ring);
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && !(current.is_empty() && i == 0) {
                if current.is_empty() {
                    return Err(bad());
                }
                chunks.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if ch == '-' && i == 0 {
                negative = true;
            } else if ch == '+' && i == 0 {
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(bad());
        }
        chunks.push((negative, current));
        for (neg, term) in chunks {
            let (coef_part, var_part) = match term.find(|c: char| c.is_ascii_alphabetic()) {
                Some(pos) => (&term[..pos], Some(&term[pos..])),
                None => (term.as_str(), None),
            };
            let coef_str = coef_part.strip_suffix('*').unwrap_or(coef_part);
            let mut coef = if coef_str.is_empty() {
                if var_part.is_none() {
                    return Err(bad());
                }
                RingValue::one(ring)
            } else {
                RingValue::parse(ring, coef_str).map_err(|_| bad())?
            };
            if neg {
                coef = -coef;
            }
            let deg = match var_part {
                None => 0,
                Some(v) => {
                    let mut it = v.chars();
                    let name = it.next().ok_or_else(bad)?;
                    if let Some(prev) = var {
                        if prev != name {
                            return Err(bad());
                        }
                    }
                    var = Some(name);
                    let rest: String = it.collect();
                    if rest.is_empty() {
                        1
                    } else {
                        let e = rest.strip_prefix('^').ok_or_else(bad)?;
                        e.parse::<usize>().map_err(|_| bad())?
                    }
                }
            };
            out.add_term(deg, &coef);
        }
        Ok(out)
    }

    /// Renders with the given variable name, highest degree first.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (d, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c } else { c.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match d {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{d}"),
            };
            if d == 0 {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    if let Some(m) = n.to_u64() {
        let mut d = 1u64;
        while d.saturating_mul(d) <= m {
            if m % d == 0 {
                small.push(BigInt::from(d));
                if d * d != m {
                    large.push(BigInt::from(m / d));
                }
            }
            d += 1;
        }
    } else {
        let mut d = BigInt::one();
        while &d * &d <= n {
            if (&n % &d).is_zero() {
                small.push(d.clone());
                if &d * &d != n {
                    large.push(&n / &d);
                }
            }
            d += 1;
        }
    }
    large.reverse();
    small.extend(large);
    small
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("X"))
    }
}

macro_rules! poly_ops {
    ($t:ty) => {
        impl Add<&$t> for &$t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                self.try_add(rhs).expect("compatible operands")
            }
        }
        impl Sub<&$t> for &$t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                self.try_add(&-rhs).expect("compatible operands")
            }
        }
        impl Mul<&$t> for &$t {
            type Output = $t;
            fn mul(self, rhs: &$t) -> $t {
                self.try_mul(rhs).expect("compatible operands")
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                self.scalar_mul(&-RingValue::one(self.ring()))
            }
        }
    };
}

poly_ops!(Poly);
poly_ops!(TruncPoly);
poly_ops!(BiPoly);

/// Dense element of `k[t]/(t^n)`, equivalently of `k[[X]]` modulo `X^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncPoly {
    ring: RingDescriptor,
    coeffs: Vec<RingValue>,
}

/// Element of the quotient `k[t]/(t^n)`.
pub type QuotPoly = TruncPoly;

impl TruncPoly {
    pub fn zero(ring: RingDescriptor, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::ZeroOrder);
        }
        Ok(TruncPoly {
            ring,
            coeffs: vec![RingValue::zero(ring); order],
        })
    }

    pub fn from_poly(p: &Poly, order: usize) -> Result<Self> {
        let mut out = Self::zero(p.ring(), order)?;
        for (d, c) in p.terms() {
            if d < order {
                out.coeffs[d] = c.clone();
            }
        }
        Ok(out)
    }

    pub fn one(ring: RingDescriptor, order: usize) -> Result<Self> {
        Self::from_poly(&Poly::one(ring), order)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(
            self.ring,
            self.coeffs.iter().cloned().enumerate(),
        )
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, d: usize) -> RingValue {
        self.coeffs
            .get(d)
            .cloned()
            .unwrap_or_else(|| RingValue::zero(self.ring))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RingValue::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                left: self.ring,
                right: other.ring,
            });
        }
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(TruncPoly {
            ring: self.ring,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.order();
        let mut out = Self::zero(self.ring, n)?;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] = &out.coeffs[i + j] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &RingValue) -> Self {
        TruncPoly {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.ring, self.order()).expect("positive order");
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `g` for the variable, truncating at the common order.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.check(g)?;
        let n = self.order();
        let mut out = Self::zero(self.ring, n)?;
        let mut power = Self::one(self.ring, n)?;
        for c in &self.coeffs {
            out = &out + &power.scalar_mul(c);
            power = &power * g;
        }
        Ok(out)
    }

    /// Compositional inverse of `g` with zero constant term and unit linear term.
    pub fn reversion(&self) -> Result<Self> {
        let n = self.order();
        if !self.coeff(0).is_zero() {
            return Err(Error::NotInvertible(
                "generator image has a nonzero constant term".into(),
            ));
        }
        let a1 = self.coeff(1);
        let inv = a1
            .inverse()
            .ok_or_else(|| Error::NotInvertible(format!("linear coefficient {a1} is not a unit")))?;
        // Fixed point h = (t - (g(h) - a1 h)) / a1, one new coefficient per round.
        let t = Self::from_poly(&Poly::var(self.ring), n)?;
        let mut h = t.scalar_mul(&inv);
        let lin = Self::from_poly(&Poly::monomial(a1, 1), n)?;
        let rest = self - &lin;
        for _ in 0..n {
            let g_h = rest.compose(&h)?;
            h = (&t - &g_h).scalar_mul(&inv);
        }
        Ok(h)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }
}

impl fmt::Display for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod t^{}", self.to_poly().display_with("t"), self.order())
    }
}

/// Element of `k[X]⊗k[Y]`: finitely many `c·X^i⊗Y^j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiPoly {
    ring: RingDescriptor,
    coeffs: BTreeMap<(usize, usize), RingValue>,
}

impl BiPoly {
    pub fn zero(ring: RingDescriptor) -> Self {
        BiPoly {
            ring,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn monomial(c: RingValue, i: usize, j: usize) -> Self {
        let mut b = BiPoly::zero(c.ring());
        b.add_term(i, j, &c);
        b
    }

    pub fn one(ring: RingDescriptor) -> Self {
        Self::monomial(RingValue::one(ring), 0, 0)
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, usize, RingValue)>>(
        ring: RingDescriptor,
        terms: I,
    ) -> Self {
        let mut b = BiPoly::zero(ring);
        for (i, j, c) in terms {
            b.add_term(i, j, &c);
        }
        b
    }

    /// `p(X)⊗Y^j`.
    pub fn from_x_poly(p: &Poly, j: usize) -> Self {
        let mut b = BiPoly::zero(p.ring());
        for (i, c) in p.terms() {
            b.add_term(i, j, c);
        }
        b
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> RingValue {
        self.coeffs
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| RingValue::zero(self.ring))
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &RingValue)> + '_ {
        self.coeffs.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: &RingValue) {
        if c.is_zero() {
            return;
        }
        let key = (i, j);
        match self.coeffs.get_mut(&key) {
            Some(v) => {
                let s = &*v + c;
                if s.is_zero() {
                    self.coeffs.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                self.coeffs.insert(key, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &BiPoly, c: &RingValue) {
        for (i, j, v) in other.terms() {
            self.add_term(i, j, &(v * c));
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                left: self.ring,
                right: other.ring,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_scaled(other, &RingValue::one(self.ring));
        Ok(out)
    }

    /// Componentwise (commutative) product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = BiPoly::zero(self.ring);
        for (a, b, x) in self.terms() {
            for (c, d, y) in other.terms() {
                out.add_term(a + c, b + d, &(x * y));
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &RingValue) -> Self {
        let mut out = BiPoly::zero(self.ring);
        out.add_scaled(self, c);
        out
    }

    /// Keeps only terms with `Y`-degree at most `cap`.
    pub fn truncate_y(&self, cap: usize) -> Self {
        BiPoly {
            ring: self.ring,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&(_, j), _)| j <= cap)
                .map(|(&k, v)| (k, v.clone()))
                .collect(),
        }
    }

    /// Coefficient of `Y^j` as a polynomial in `X`.
    pub fn y_slice(&self, j: usize) -> Poly {
        Poly::from_terms(
            self.ring,
            self.terms()
                .filter(|&(_, jj, _)| jj == j)
                .map(|(i, _, c)| (i, c.clone())),
        )
    }

    /// Transposes the roles of `X` and `Y`.
    pub fn swap(&self) -> Self {
        BiPoly {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        }
    }

    pub fn max_y_degree(&self) -> Option<usize> {
        self.coeffs.keys().map(|&(_, j)| j).max()
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(i, j, c)| format!("{c}*X^{i}⊗Y^{j}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: RingDescriptor = RingDescriptor::Rationals;

    fn p(s: &str) -> Poly {
        Poly::parse(Q, s).unwrap()
    }

    fn v(s: &str) -> RingValue {
        RingValue::parse(Q, s).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&p("X+1") * &p("X-1"), p("X^2-1"));
    }

    #[test]
    fn truncated_square() {
        let a = TruncPoly::from_poly(&p("t+t^2"), 3).unwrap();
        assert_eq!((&a * &a).to_poly(), p("t^2"));
    }

    #[test]
    fn bipoly_componentwise_product() {
        let x = BiPoly::monomial(RingValue::one(Q), 1, 0);
        let y = BiPoly::monomial(RingValue::one(Q), 0, 1);
        assert_eq!(&x * &y, BiPoly::monomial(RingValue::one(Q), 1, 1));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("3Z^2+Z").formal_derivative(), p("6Z+1"));
        assert!(p("5").formal_derivative().is_zero());
        let z2 = RingDescriptor::mod_n(2).unwrap();
        assert!(Poly::parse(z2, "Z^2").unwrap().formal_derivative().is_zero());
    }

    #[test]
    fn multiple_root_examples() {
        assert!(p("Z^2-4Z+4").is_multiple_root(&v("2")));
        assert!(!p("Z-2").is_multiple_root(&v("2")));
        assert!(Poly::zero(Q).is_multiple_root(&v("17/3")));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(p("Z^2").shift_substitute(&v("1")), p("Z^2+2Z+1"));
        assert_eq!(p("Z").shift_substitute(&v("-3")), p("Z-3"));
    }

    #[test]
    fn root_examples() {
        assert_eq!(p("2Z^2-2").rational_root_candidates().unwrap(), vec![v("-1"), v("1")]);
        assert!(p("Z^2+1").rational_root_candidates().unwrap().is_empty());
        assert_eq!(p("Z").rational_root_candidates().unwrap(), vec![v("0")]);
        assert_eq!(
            Poly::zero(Q).rational_root_candidates(),
            Err(Error::InfiniteRootSet)
        );
        let roots = p("6Z^3 - 5Z^2 + Z").rational_root_candidates().unwrap();
        assert_eq!(roots, vec![v("0"), v("1/3"), v("1/2")]);
        let zr = RingDescriptor::Integers;
        let roots = Poly::parse(zr, "2Z^2 - 3Z + 1").unwrap().rational_root_candidates().unwrap();
        assert_eq!(roots, vec![RingValue::one(zr)]);
    }

    #[test]
    fn degree_sentinel() {
        assert_eq!(Poly::zero(Q).degree(), Degree::NegInf);
        assert!(Degree::NegInf < Degree::Finite(0));
        assert_eq!(p("X^3+1").degree(), Degree::Finite(3));
    }

    #[test]
    fn parser_forms() {
        assert_eq!(p("Y^2").coeff(2), v("1"));
        assert_eq!(p("-Y+1"), Poly::from_i64s(Q, &[1, -1]));
        assert_eq!(p("3/2*Y^3 - Y").coeff(3), v("3/2"));
        assert!(p("0").is_zero());
        assert!(Poly::parse(Q, "X + Y").is_err());
        assert!(Poly::parse(Q, "1 +").is_err());
        assert!(Poly::parse(Q, "").is_err());
        assert_eq!(p("X^2 - 2*X + 1").display_with("X"), "X^2 - 2*X + 1");
        assert_eq!(p("-1/2*X").display_with("Y"), "-1/2*Y");
    }

    #[test]
    fn reversion_inverts() {
        let g = TruncPoly::from_poly(&p("2t + t^2 - t^4"), 6).unwrap();
        let h = g.reversion().unwrap();
        let id = TruncPoly::from_poly(&p("t"), 6).unwrap();
        assert_eq!(g.compose(&h).unwrap(), id);
        assert_eq!(h.compose(&g).unwrap(), id);
        let bad = TruncPoly::from_poly(&p("t^2"), 4).unwrap();
        assert!(bad.reversion().is_err());
    }

    #[test]
    fn order_mismatch_is_structural() {
        let a = TruncPoly::one(Q, 3).unwrap();
        let b = TruncPoly::one(Q, 4).unwrap();
        assert!(matches!(a.try_mul(&b), Err(Error::OrderMismatch { .. })));
        assert_eq!(TruncPoly::zero(Q, 0), Err(Error::ZeroOrder));
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(-6i64..6, 0..6).prop_map(|c| Poly::from_i64s(Q, &c))
    }

    proptest! {
        #[test]
        fn mul_assoc_comm(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn trunc_mul_matches_poly(a in small_poly(), b in small_poly(), n in 1usize..8) {
            let ta = TruncPoly::from_poly(&a, n).unwrap();
            let tb = TruncPoly::from_poly(&b, n).unwrap();
            prop_assert_eq!((&ta * &tb).to_poly(), (&a * &b).truncate(n));
        }

        #[test]
        fn trunc_mul_assoc(a in small_poly(), b in small_poly(), c in small_poly(), n in 1usize..8) {
            let t = |x: &Poly| TruncPoly::from_poly(x, n).unwrap();
            prop_assert_eq!(&(&t(&a) * &t(&b)) * &t(&c), &t(&a) * &(&t(&b) * &t(&c)));
        }

        #[test]
        fn bipoly_mul_assoc(
            a in proptest::collection::vec((0usize..3, 0usize..3, -4i64..4), 0..4),
            b in proptest::collection::vec((0usize..3, 0usize..3, -4i64..4), 0..4),
            c in proptest::collection::vec((0usize..3, 0usize..3, -4i64..4), 0..4),
        ) {
            let mk = |t: &Vec<(usize, usize, i64)>| BiPoly::from_terms(Q, t.iter().map(|&(i, j, x)| (i, j, RingValue::from_i64(Q, x))));
            let (a, b, c) = (mk(&a), mk(&b), mk(&c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn shift_round_trip(a in small_poly(), n in -5i64..5, d in 1i64..4) {
            let c = RingValue::from_ratio(Q, &BigInt::from(n), &BigInt::from(d)).unwrap();
            prop_assert_eq!(a.shift_substitute(&c).shift_substitute(&-&c), a);
        }

        #[test]
        fn derivative_linear_and_leibniz(a in small_poly(), b in small_poly(), k in -4i64..4) {
            let kk = RingValue::from_i64(Q, k);
            let d = Poly::formal_derivative;
            prop_assert_eq!(d(&(&a + &b.scalar_mul(&kk))), &d(&a) + &d(&b).scalar_mul(&kk));
            prop_assert_eq!(d(&(&a * &b)), &(&d(&a) * &b) + &(&a * &d(&b)));
        }

        #[test]
        fn found_roots_are_roots(a in small_poly()) {
            if !a.is_zero() {
                for r in a.rational_root_candidates().unwrap() {
                    prop_assert!(a.eval(&r).is_zero());
                }
            }
        }
    }
}
