//! Exact coefficient rings: Q, Z and Z/n.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingDescriptor {
    Rationals,
    Integers,
    ModN(u64),
}

impl RingDescriptor {
    pub fn mod_n(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidModulus(n));
        }
        Ok(RingDescriptor::ModN(n))
    }

    pub fn is_domain(&self) -> bool {
        match *self {
            RingDescriptor::Rationals | RingDescriptor::Integers => true,
            RingDescriptor::ModN(n) => is_prime(n),
        }
    }

    pub fn is_char_zero(&self) -> bool {
        !matches!(self, RingDescriptor::ModN(_))
    }

    /// Whether the ring embeds in Q (rational root search is available).
    pub fn is_rational(&self) -> bool {
        self.is_char_zero()
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::Rationals => write!(f, "Q"),
            RingDescriptor::Integers => write!(f, "Z"),
            RingDescriptor::ModN(n) => write!(f, "Z/{n}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Rat(BigRational),
    Int(BigInt),
    Res(u64),
}

/// An element of a [`RingDescriptor`] in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingValue {
    ring: RingDescriptor,
    repr: Repr,
}

fn reduce_mod(v: &BigInt, n: u64) -> u64 {
    let m = BigInt::from(n);
    v.mod_floor(&m).to_u64().expect("residue fits in u64")
}

fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(n as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(n as i128) as u64)
}

impl RingValue {
    pub fn zero(ring: RingDescriptor) -> Self {
        Self::from_i64(ring, 0)
    }

    pub fn one(ring: RingDescriptor) -> Self {
        Self::from_i64(ring, 1)
    }

    pub fn from_i64(ring: RingDescriptor, v: i64) -> Self {
        Self::from_bigint(ring, &BigInt::from(v))
    }

    pub fn from_bigint(ring: RingDescriptor, v: &BigInt) -> Self {
        let repr = match ring {
            RingDescriptor::Rationals => Repr::Rat(BigRational::from_integer(v.clone())),
            RingDescriptor::Integers => Repr::Int(v.clone()),
            RingDescriptor::ModN(n) => Repr::Res(reduce_mod(v, n)),
        };
        RingValue { ring, repr }
    }

    /// The class of `num/den`; fails when `den` is not invertible in the ring.
    pub fn from_ratio(ring: RingDescriptor, num: &BigInt, den: &BigInt) -> Result<Self> {
        let not_rep = || Error::NotRepresentable {
            value: format!("{num}/{den}"),
            ring,
        };
        if den.is_zero() {
            return Err(not_rep());
        }
        match ring {
            RingDescriptor::Rationals => Ok(RingValue {
                ring,
                repr: Repr::Rat(BigRational::new(num.clone(), den.clone())),
            }),
            RingDescriptor::Integers => {
                let (q, r) = num.div_rem(den);
                if !r.is_zero() {
                    return Err(not_rep());
                }
                Ok(RingValue {
                    ring,
                    repr: Repr::Int(q),
                })
            }
            RingDescriptor::ModN(n) => {
                let d = reduce_mod(den, n);
                let inv = mod_inverse(d, n).ok_or_else(not_rep)?;
                let a = reduce_mod(num, n);
                Ok(RingValue {
                    ring,
                    repr: Repr::Res(mul_mod(a, inv, n)),
                })
            }
        }
    }

    pub fn from_rational(ring: RingDescriptor, q: &BigRational) -> Result<Self> {
        Self::from_ratio(ring, q.numer(), q.denom())
    }

    /// Parses `"m"` or `"p/q"` (optional sign and surrounding spaces).
    pub fn parse(ring: RingDescriptor, s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "ring value",
            input: s.to_string(),
        };
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        Self::from_ratio(ring, &num, &den)
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Rat(q) => q.is_zero(),
            Repr::Int(z) => z.is_zero(),
            Repr::Res(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Rat(q) => q.is_one(),
            Repr::Int(z) => z.is_one(),
            Repr::Res(r) => *r == 1,
        }
    }

    /// Value as a rational number; `None` for residues.
    pub fn to_rational(&self) -> Option<BigRational> {
        match &self.repr {
            Repr::Rat(q) => Some(q.clone()),
            Repr::Int(z) => Some(BigRational::from_integer(z.clone())),
            Repr::Res(_) => None,
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match &self.repr {
            Repr::Rat(q) if q.is_integer() => q.numer().to_i64(),
            Repr::Rat(_) => None,
            Repr::Int(z) => z.to_i64(),
            Repr::Res(r) => i64::try_from(*r).ok(),
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
        let repr = match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(a + b),
            (Repr::Int(a), Repr::Int(b)) => Repr::Int(a + b),
            (Repr::Res(a), Repr::Res(b)) => Repr::Res(add_mod(*a, *b, self.modulus())),
            _ => unreachable!("ring tags agree"),
        };
        Ok(RingValue {
            ring: self.ring,
            repr,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => Repr::Rat(a * b),
            (Repr::Int(a), Repr::Int(b)) => Repr::Int(a * b),
            (Repr::Res(a), Repr::Res(b)) => Repr::Res(mul_mod(*a, *b, self.modulus())),
            _ => unreachable!("ring tags agree"),
        };
        Ok(RingValue {
            ring: self.ring,
            repr,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.try_add(&other.neg_ref())
    }

    fn neg_ref(&self) -> Self {
        let repr = match &self.repr {
            Repr::Rat(a) => Repr::Rat(-a),
            Repr::Int(a) => Repr::Int(-a),
            Repr::Res(a) => {
                let n = self.modulus();
                Repr::Res((n - a) % n)
            }
        };
        RingValue {
            ring: self.ring,
            repr,
        }
    }

    fn modulus(&self) -> u64 {
        match self.ring {
            RingDescriptor::ModN(n) => n,
            _ => 0,
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut result = RingValue::one(self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Multiplicative inverse when the value is a unit.
    pub fn inverse(&self) -> Option<Self> {
        match &self.repr {
            Repr::Rat(q) if !q.is_zero() => Some(RingValue {
                ring: self.ring,
                repr: Repr::Rat(q.recip()),
            }),
            Repr::Int(z) if z.abs().is_one() => Some(self.clone()),
            Repr::Res(r) => mod_inverse(*r, self.modulus()).map(|x| RingValue {
                ring: self.ring,
                repr: Repr::Res(x),
            }),
            _ => None,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.inverse().is_some()
    }

    /// Smallest `e >= 1` with `self^e = 0`, if any.
    pub fn nilpotency_index(&self) -> Option<u32> {
        if self.is_zero() {
            return Some(1);
        }
        match &self.repr {
            Repr::Res(_) => {
                // The index never exceeds log2(n).
                let mut p = self.clone();
                for e in 1..=64u32 {
                    if p.is_zero() {
                        return Some(e);
                    }
                    p = &p * self;
                }
                None
            }
            _ => None,
        }
    }

    /// Whether `self` lies in the principal ideal generated by `generator`.
    pub fn in_ideal(&self, generator: &RingValue) -> bool {
        if self.is_zero() {
            return true;
        }
        match (&self.repr, &generator.repr) {
            (Repr::Rat(_), Repr::Rat(b)) => !b.is_zero(),
            (Repr::Int(c), Repr::Int(b)) => !b.is_zero() && (c % b).is_zero(),
            (Repr::Res(c), Repr::Res(b)) => {
                let g = b.gcd(&self.modulus());
                c % g == 0
            }
            _ => false,
        }
    }

    /// Multiplies by an integer scalar.
    pub fn scale_int(&self, k: &BigInt) -> Self {
        self * &RingValue::from_bigint(self.ring, k)
    }
}

fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

impl fmt::Display for RingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rat(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Repr::Rat(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Repr::Int(z) => write!(f, "{z}"),
            Repr::Res(r) => write!(f, "{r}"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&RingValue> for &RingValue {
            type Output = RingValue;
            fn $m(self, rhs: &RingValue) -> RingValue {
                self.$try(rhs).expect("operands share a ring")
            }
        }
        impl $tr<RingValue> for RingValue {
            type Output = RingValue;
            fn $m(self, rhs: RingValue) -> RingValue {
                (&self).$try(&rhs).expect("operands share a ring")
            }
        }
        impl $tr<&RingValue> for RingValue {
            type Output = RingValue;
            fn $m(self, rhs: &RingValue) -> RingValue {
                (&self).$try(rhs).expect("operands share a ring")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &RingValue {
    type Output = RingValue;
    fn neg(self) -> RingValue {
        self.neg_ref()
    }
}

impl Neg for RingValue {
    type Output = RingValue;
    fn neg(self) -> RingValue {
        self.neg_ref()
    }
}

/// C(n, k), zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

/// C(n, k) as an element of `ring`.
pub fn binomial_in(ring: RingDescriptor, n: u64, k: i64) -> RingValue {
    RingValue::from_bigint(ring, &binomial(n, k))
}

/// `(-1)^e` as a signed integer.
pub fn sign_pow(e: u64) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl RingValue {
    /// True for a negative rational or integer; residues are never negative.
    pub fn is_negative(&self) -> bool {
        match &self.repr {
            Repr::Rat(q) => q.is_negative(),
            Repr::Int(z) => z.is_negative(),
            Repr::Res(_) => false,
        }
    }
}
