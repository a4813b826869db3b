//! Exact base fields: the rationals and prime fields `F_p` with `p < 2^31`.
//!
//! Every algebraic structure in the crate is generic over a [`Field`], which
//! is a small context object carrying whatever runtime data the arithmetic
//! needs (the modulus for `F_p`). Elements are plain values; all arithmetic
//! goes through the context.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Which field a presentation asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldSpec {
    Rational,
    Prime(u32),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FieldSpec {
    /// Parses `Q` or `F<p>`; `p` must be a prime below `2^31`.
    pub fn parse(s: &str) -> Option<FieldSpec> {
        if s == "Q" {
            return Some(FieldSpec::Rational);
        }
        let digits = s.strip_prefix('F')?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let p: u64 = digits.parse().ok()?;
        if p >= (1 << 31) || !is_prime(p) {
            return None;
        }
        Some(FieldSpec::Prime(p as u32))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field. Implementations are cheap to clone and thread-safe.
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// `num / den`, or `None` when `den` vanishes in the field.
    #[allow(clippy::wrong_self_convention)]
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<Self::Elem>;
    /// Canonical text form: integers print bare, proper fractions as `p/q`.
    fn format(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `a` if `negate` is false, `-a` otherwise.
    fn signed(&self, a: &Self::Elem, negate: bool) -> Self::Elem {
        if negate {
            self.neg(a)
        } else {
            a.clone()
        }
    }

    /// `acc += c * a`
    fn add_mul_assign(&self, acc: &mut Self::Elem, c: &Self::Elem, a: &Self::Elem) {
        let prod = self.mul(c, a);
        *acc = self.add(acc, &prod);
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<BigRational> {
        if den.is_zero() {
            None
        } else {
            Some(BigRational::new(num.clone(), den.clone()))
        }
    }
    fn format(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

/// `F_p` with canonical representatives in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    /// Panics unless `p` is a prime below `2^31`; use [`FieldSpec::parse`]
    /// to validate untrusted input first.
    pub fn new(p: u32) -> PrimeField {
        assert!(p < (1 << 31) && is_prime(p as u64), "{p} is not a prime below 2^31");
        PrimeField { p }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    fn reduce_big(&self, n: &BigInt) -> u32 {
        let p = BigInt::from(self.p);
        let mut r = n % &p;
        if r.is_negative() {
            r += &p;
        }
        r.to_u32().expect("residue fits in u32")
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        (s % self.p as u64) as u32
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + self.p as u64 - *b as u64;
        (s % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        let p = self.p as u64;
        let (mut base, mut exp, mut acc) = (*a as u64, p - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        Some(acc as u32)
    }
    fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<u32> {
        let d = self.reduce_big(den);
        let d_inv = self.inv(&d)?;
        Some(self.mul(&self.reduce_big(num), &d_inv))
    }
    fn format(&self, a: &u32) -> String {
        a.to_string()
    }
    fn add_mul_assign(&self, acc: &mut u32, c: &u32, a: &u32) {
        let s = (*acc as u64 + *c as u64 * *a as u64) % self.p as u64;
        *acc = s as u32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_spec_parsing() {
        assert_eq!(FieldSpec::parse("Q"), Some(FieldSpec::Rational));
        assert_eq!(FieldSpec::parse("F7"), Some(FieldSpec::Prime(7)));
        assert_eq!(FieldSpec::parse("F2147483647"), Some(FieldSpec::Prime(2147483647)));
        assert_eq!(FieldSpec::parse("F8"), None);
        assert_eq!(FieldSpec::parse("F"), None);
        assert_eq!(FieldSpec::parse("F-3"), None);
        assert_eq!(FieldSpec::parse("F4294967311"), None);
    }

    #[test]
    fn prime_field_is_canonical() {
        let f = PrimeField::new(7);
        assert_eq!(f.from_i64(-1), 6);
        assert_eq!(f.neg(&0), 0);
        assert_eq!(f.mul(&3, &f.inv(&3).unwrap()), 1);
        let half = f.from_ratio(&BigInt::from(1), &BigInt::from(2)).unwrap();
        assert_eq!(f.mul(&half, &2), 1);
        assert!(f.from_ratio(&BigInt::from(1), &BigInt::from(14)).is_none());
    }

    #[test]
    fn rational_formatting() {
        let q = Rationals;
        let x = q.from_ratio(&BigInt::from(-4), &BigInt::from(6)).unwrap();
        assert_eq!(q.format(&x), "-2/3");
        assert_eq!(q.format(&q.from_i64(5)), "5");
    }
}
