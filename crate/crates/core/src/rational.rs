//! Exact rational numbers.
//!
//! [`Rational`] keeps values that fit a pair of machine words inline and only
//! spills to heap-allocated big integers when an intermediate result does not
//! fit. The representation is canonical (lowest terms, positive denominator,
//! inline whenever possible), so derived equality and hashing are exact.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone)]
enum Repr {
    // den > 0, gcd(num, den) = 1, num != i64::MIN
    Small(i64, i64),
    // den > 0, gcd(num, den) = 1, does not fit `Small`
    Big(Box<(BigInt, BigInt)>),
}

/// An arbitrary-precision fraction, always stored in lowest terms.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer in rational literal `{0}`")]
    InvalidInteger(String),
    #[error("zero denominator in rational literal `{0}`")]
    ZeroDenominator(String),
}

#[inline]
fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[inline]
fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        return gcd_u64(a as u64, b as u64) as u128;
    }
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[inline]
fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_integer(n: i64) -> Self {
        if n == i64::MIN {
            return Self::from_bigints(BigInt::from(n), BigInt::one());
        }
        Rational(Repr::Small(n, 1))
    }

    /// Builds `num / den`. Panics when `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd_u128(num.unsigned_abs(), den as u128);
        if g > 1 {
            num /= g as i128;
            den /= g as i128;
        }
        if fits(num) && fits(den) {
            Rational(Repr::Small(num as i64, den as i64))
        } else {
            Rational(Repr::Big(Box::new((BigInt::from(num), BigInt::from(den)))))
        }
    }

    /// Builds a reduced fraction from big integers. Panics when `den` is zero.
    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() { (num, den) } else { (num / &g, den / &g) };
        Self::demote(num, den)
    }

    fn demote(num: BigInt, den: BigInt) -> Self {
        if let (Some(n), Some(d)) = (num.to_i64(), den.to_i64()) {
            if n != i64::MIN {
                return Rational(Repr::Small(n, d));
            }
        }
        Rational(Repr::Big(Box::new((num, den))))
    }

    fn big_parts(&self) -> (BigInt, BigInt) {
        match &self.0 {
            Repr::Small(n, d) => (BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (b.0.clone(), b.1.clone()),
        }
    }

    /// Numerator and denominator when both fit in an `i64`.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match &self.0 {
            Repr::Small(n, d) => Some((*n, *d)),
            Repr::Big(_) => None,
        }
    }

    pub fn numer(&self) -> BigInt {
        self.big_parts().0
    }

    pub fn denom(&self) -> BigInt {
        self.big_parts().1
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.1.is_one(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(b) => match b.0.sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn checked_recip(&self) -> Option<Self> {
        match &self.0 {
            Repr::Small(0, _) => None,
            Repr::Small(n, d) => Some(Self::from_i128(*d as i128, *n as i128)),
            Repr::Big(b) => Some(Self::from_bigints(b.1.clone(), b.0.clone())),
        }
    }

    pub fn recip(&self) -> Self {
        self.checked_recip().expect("reciprocal of zero")
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Rational::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn floor(&self) -> BigInt {
        let (n, d) = self.big_parts();
        n.div_floor(&d)
    }

    pub fn ceil(&self) -> BigInt {
        let (n, d) = self.big_parts();
        -((-n).div_floor(&d))
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => {
                let (n, d) = (&b.0, &b.1);
                let shift = n.bits() as i64 - d.bits() as i64;
                // Scale to keep ~64 significant bits on both sides of the division.
                let (sn, sd) = if shift > 0 {
                    (n.clone(), d << (shift as usize))
                } else {
                    (n << ((-shift) as usize), d.clone())
                };
                let sn = sn << 64usize;
                let q = sn / sd;
                q.to_f64().unwrap_or(f64::NAN) * 2f64.powi((shift - 64) as i32)
            }
        }
    }

    pub fn max_of(a: &Rational, b: &Rational) -> Rational {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn min_of(a: &Rational, b: &Rational) -> Rational {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn add_ref(&self, rhs: &Rational) -> Rational {
        if let (Repr::Small(n1, d1), Repr::Small(n2, d2)) = (&self.0, &rhs.0) {
            let (n1, d1, n2, d2) = (*n1 as i128, *d1 as i128, *n2 as i128, *d2 as i128);
            if d1 == d2 {
                return Self::from_i128(n1 + n2, d1);
            }
            let g = gcd_u64(d1 as u64, d2 as u64) as i128;
            if g == 1 {
                let num = n1 * d2 + n2 * d1;
                let den = d1 * d2;
                if fits(num) && fits(den) {
                    return Rational(Repr::Small(num as i64, den as i64));
                }
                return Self::from_i128(num, den);
            }
            let t = n1 * (d2 / g) + n2 * (d1 / g);
            return Self::from_i128(t, (d1 / g) * d2);
        }
        let (n1, d1) = self.big_parts();
        let (n2, d2) = rhs.big_parts();
        Self::from_bigints(n1 * &d2 + n2 * &d1, d1 * d2)
    }

    fn mul_ref(&self, rhs: &Rational) -> Rational {
        if let (Repr::Small(n1, d1), Repr::Small(n2, d2)) = (&self.0, &rhs.0) {
            if *n1 == 0 || *n2 == 0 {
                return Rational::zero();
            }
            let g1 = gcd_u64(n1.unsigned_abs(), *d2 as u64) as i64;
            let g2 = gcd_u64(n2.unsigned_abs(), *d1 as u64) as i64;
            let num = (n1 / g1) as i128 * (n2 / g2) as i128;
            let den = (d1 / g2) as i128 * (d2 / g1) as i128;
            if fits(num) && fits(den) {
                return Rational(Repr::Small(num as i64, den as i64));
            }
            return Rational(Repr::Big(Box::new((BigInt::from(num), BigInt::from(den)))));
        }
        let (n1, d1) = self.big_parts();
        let (n2, d2) = rhs.big_parts();
        Self::from_bigints(n1 * n2, d1 * d2)
    }

    fn div_ref(&self, rhs: &Rational) -> Rational {
        let inv = rhs.checked_recip().expect("division by zero");
        self.mul_ref(&inv)
    }

    fn neg_ref(&self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
            Repr::Big(b) => Self::demote(-b.0.clone(), b.1.clone()),
        }
    }

    /// `self + a * b`, the inner update of every elimination loop.
    pub fn add_mul(&self, a: &Rational, b: &Rational) -> Rational {
        if a.is_zero() || b.is_zero() {
            return self.clone();
        }
        self.add_ref(&a.mul_ref(b))
    }

    /// `self - a * b`.
    pub fn sub_mul(&self, a: &Rational, b: &Rational) -> Rational {
        if a.is_zero() || b.is_zero() {
            return self.clone();
        }
        self.add_ref(&a.mul_ref(b).neg_ref())
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x.0 == y.0 && x.1 == y.1,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.0.hash(state);
                b.1.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Repr::Small(n1, d1), Repr::Small(n2, d2)) = (&self.0, &other.0) {
            return (*n1 as i128 * *d2 as i128).cmp(&(*n2 as i128 * *d1 as i128));
        }
        let (n1, d1) = self.big_parts();
        let (n2, d2) = other.big_parts();
        (n1 * d2).cmp(&(n2 * d1))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! forward_binop {
    ($Trait:ident, $method:ident, $imp:ident, $AssignTrait:ident, $assign:ident) => {
        impl $Trait<&Rational> for &Rational {
            type Output = Rational;
            #[inline]
            fn $method(self, rhs: &Rational) -> Rational {
                self.$imp(rhs)
            }
        }
        impl $Trait<Rational> for &Rational {
            type Output = Rational;
            #[inline]
            fn $method(self, rhs: Rational) -> Rational {
                self.$imp(&rhs)
            }
        }
        impl $Trait<&Rational> for Rational {
            type Output = Rational;
            #[inline]
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$imp(rhs)
            }
        }
        impl $Trait<Rational> for Rational {
            type Output = Rational;
            #[inline]
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$imp(&rhs)
            }
        }
        impl $AssignTrait<&Rational> for Rational {
            #[inline]
            fn $assign(&mut self, rhs: &Rational) {
                *self = (&*self).$imp(rhs);
            }
        }
        impl $AssignTrait<Rational> for Rational {
            #[inline]
            fn $assign(&mut self, rhs: Rational) {
                *self = (&*self).$imp(&rhs);
            }
        }
    };
}

impl Rational {
    #[inline]
    fn sub_ref(&self, rhs: &Rational) -> Rational {
        self.add_ref(&rhs.neg_ref())
    }
}

forward_binop!(Add, add, add_ref, AddAssign, add_assign);
forward_binop!(Sub, sub, sub_ref, SubAssign, sub_assign);
forward_binop!(Mul, mul, mul_ref, MulAssign, mul_assign);
forward_binop!(Div, div, div_ref, DivAssign, div_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_ref()
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_ref()
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Rational::from_integer(v as i64)
    }
}

impl From<u64> for Rational {
    fn from(v: u64) -> Self {
        Rational::from_bigints(BigInt::from(v), BigInt::one())
    }
}

impl From<usize> for Rational {
    fn from(v: usize) -> Self {
        Rational::from(v as u64)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::demote(v, BigInt::one())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.1.is_one() => write!(f, "{}", b.0),
            Repr::Big(b) => write!(f, "{}/{}", b.0, b.1),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts a decimal integer (`-3`) or a fraction (`7/12`, `-1/-2`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let parse_int = |t: &str| -> Result<BigInt, ParseRationalError> {
            let t = t.trim();
            let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
                return Err(ParseRationalError::InvalidInteger(s.to_string()));
            }
            t.parse::<BigInt>()
                .map_err(|_| ParseRationalError::InvalidInteger(s.to_string()))
        };
        match s.split_once('/') {
            None => Ok(Rational::from(parse_int(s)?)),
            Some((n, d)) => {
                let n = parse_int(n)?;
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(ParseRationalError::ZeroDenominator(s.to_string()));
                }
                Ok(Rational::from_bigints(n, d))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a \"num/den\" string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(Rational::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        Ok(Rational::from(v))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
        Err(E::custom(format!(
            "floating-point value {v} is not allowed; write it as a \"num/den\" string"
        )))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Shorthand for `Rational::new(n, d)`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Shorthand for an integer-valued rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(n)
}
