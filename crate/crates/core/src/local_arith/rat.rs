//! Exact rationals, the p-adic valuation, and extended real values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, always kept as a reduced fraction with
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Rat(BigRational::from_integer(v))
    }

    /// `num/den`; panics on a zero denominator.
    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big_frac(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    /// `p^e` for any integer exponent.
    pub fn pow_p(p: u64, e: i64) -> Self {
        let base = BigInt::from(p);
        let mag = num_traits::pow(base, e.unsigned_abs() as usize);
        if e >= 0 {
            Rat::from_bigint(mag)
        } else {
            Rat::from_big_frac(BigInt::one(), mag)
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rat(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// The value as an `i64` if it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    /// p-adic valuation; `None` for zero.
    pub fn val(&self, p: u64) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(int_val(self.numer(), p) - int_val(self.denom(), p))
    }

    /// Representative of `self` modulo `p^e Z_(p)`: the unique rational with
    /// p-power denominator lying in `[0, p^e)` and congruent to `self`.
    /// Integral inputs with `e >= 0` get integer representatives.
    pub fn reduce_mod_pe(&self, p: u64, e: i64) -> Rat {
        if self.is_zero() {
            return Rat::zero();
        }
        let pb = BigInt::from(p);
        let s = int_val(self.denom(), p);
        let unit_den = self.denom() / num_traits::pow(pb.clone(), s as usize);
        let shift = s.max(-e).max(0);
        let top = e + shift;
        if top <= 0 {
            return Rat::zero();
        }
        let modulus = num_traits::pow(pb.clone(), top as usize);
        // self * p^shift = numer * p^(shift - s) / unit_den, an element of Z_(p)
        let scaled_num = self.numer() * num_traits::pow(pb.clone(), (shift - s) as usize);
        let inv = mod_inverse(&unit_den.mod_floor(&modulus), &modulus);
        let c = (scaled_num * inv).mod_floor(&modulus);
        Rat::from_big_frac(c, num_traits::pow(pb, shift as usize))
    }
}

fn int_val(v: &BigInt, p: u64) -> i64 {
    let pb = BigInt::from(p);
    let mut x = v.abs();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        x = q;
        k += 1;
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let eg = a.extended_gcd(m);
    debug_assert!(eg.gcd.is_one(), "not invertible modulo {m}");
    eg.x.mod_floor(m)
}

/// p-adic valuation of a rational, `PlusInfinity` at zero.
pub fn vval(q: &Rat, p: u64) -> ExtVal {
    match q.val(p) {
        Some(v) => ExtVal::Finite(Rat::from_int(v)),
        None => ExtVal::PlusInfinity,
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((a, b)) => {
                let num = BigInt::from_str(a.trim()).map_err(|_| bad())?;
                let den = BigInt::from_str(b.trim()).map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(Rat::from_big_frac(num, den))
            }
            None => BigInt::from_str(s).map(Rat::from_bigint).map_err(|_| bad()),
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(v) => Ok(Rat::from_int(v)),
        }
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::from_int(v)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &'a Rat) -> Rat {
                Rat(self.0.$m(&rhs.0))
            }
        }
        impl<'a> $tr<Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat((&self.0).$m(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, rhs: &'b Rat) -> Rat {
                Rat((&self.0).$m(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Self {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

/// A value in the extended real line `[-inf, +inf]` with rational finite part.
///
/// The derived order is the intended one: `MinusInfinity < Finite(_) < PlusInfinity`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtVal {
    MinusInfinity,
    Finite(Rat),
    PlusInfinity,
}

impl ExtVal {
    pub fn finite(v: impl Into<Rat>) -> Self {
        ExtVal::Finite(v.into())
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            ExtVal::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtVal::Finite(_))
    }

    /// Sum, undefined only for `(-inf) + (+inf)`.
    pub fn checked_add(&self, other: &ExtVal) -> Option<ExtVal> {
        use ExtVal::*;
        match (self, other) {
            (MinusInfinity, PlusInfinity) | (PlusInfinity, MinusInfinity) => None,
            (MinusInfinity, _) | (_, MinusInfinity) => Some(MinusInfinity),
            (PlusInfinity, _) | (_, PlusInfinity) => Some(PlusInfinity),
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
        }
    }

    pub fn negate(&self) -> ExtVal {
        match self {
            ExtVal::MinusInfinity => ExtVal::PlusInfinity,
            ExtVal::PlusInfinity => ExtVal::MinusInfinity,
            ExtVal::Finite(r) => ExtVal::Finite(-r),
        }
    }

    /// Compare with a finite rational.
    pub fn cmp_rat(&self, r: &Rat) -> Ordering {
        match self {
            ExtVal::MinusInfinity => Ordering::Less,
            ExtVal::PlusInfinity => Ordering::Greater,
            ExtVal::Finite(a) => a.cmp(r),
        }
    }
}

impl fmt::Display for ExtVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtVal::MinusInfinity => write!(f, "-inf"),
            ExtVal::PlusInfinity => write!(f, "+inf"),
            ExtVal::Finite(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for ExtVal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-inf" => Ok(ExtVal::MinusInfinity),
            "+inf" | "inf" => Ok(ExtVal::PlusInfinity),
            other => other.parse().map(ExtVal::Finite),
        }
    }
}

impl Serialize for ExtVal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtVal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
