//! Arbitrary-precision positive integers.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A natural number `>= 1`. Serialized as a decimal string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PosInt(BigUint);

impl PosInt {
    pub fn new(value: BigUint) -> Result<Self> {
        if value.is_zero() {
            return Err(Error::invalid("positive integer must be >= 1"));
        }
        Ok(PosInt(value))
    }

    pub fn from_u64(value: u64) -> Result<Self> {
        Self::new(BigUint::from(value))
    }

    /// Panics on zero. Intended for literals.
    pub fn lit(value: u64) -> Self {
        Self::from_u64(value).expect("literal must be positive")
    }

    pub fn one() -> Self {
        PosInt(BigUint::one())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// `self - other` when the difference is still positive.
    pub fn checked_sub(&self, other: &PosInt) -> Option<PosInt> {
        if self.0 > other.0 {
            Some(PosInt(&self.0 - &other.0))
        } else {
            None
        }
    }

    /// Number of decimal digits.
    pub fn digits(&self) -> usize {
        decimal_digits(&self.0)
    }

    pub fn pow(&self, exp: u32) -> PosInt {
        PosInt(num_traits::pow(self.0.clone(), exp as usize))
    }
}

/// Exact decimal digit count of a nonzero integer.
pub(crate) fn decimal_digits(v: &BigUint) -> usize {
    let bits = v.bits();
    if bits == 0 {
        return 1;
    }
    const LOG10_2: f64 = std::f64::consts::LOG10_2;
    let lower = ((bits - 1) as f64 * LOG10_2).floor() as usize + 1;
    let upper = (bits as f64 * LOG10_2).floor() as usize + 1;
    if lower == upper && bits < 1 << 40 {
        // the float estimate can be off by one right at the boundary, so only
        // trust it away from it
        let margin_lo = (bits - 1) as f64 * LOG10_2 - ((bits - 1) as f64 * LOG10_2).floor();
        let margin_hi = (bits as f64 * LOG10_2).ceil() - bits as f64 * LOG10_2;
        if margin_lo > 1e-9 && margin_hi > 1e-9 {
            return lower;
        }
    }
    v.to_str_radix(10).len()
}

/// `true` when `v` has at most `budget` decimal digits.
pub(crate) fn digits_at_most(v: &BigUint, budget: usize) -> bool {
    let bits = v.bits();
    const LOG10_2: f64 = std::f64::consts::LOG10_2;
    let upper = (bits as f64 * LOG10_2).floor() as usize + 1;
    if upper <= budget {
        return true;
    }
    let lower = (bits.saturating_sub(1) as f64 * LOG10_2).floor() as usize + 1;
    if lower > budget + 1 {
        return false;
    }
    decimal_digits(v) <= budget
}

impl From<std::num::NonZeroU64> for PosInt {
    fn from(v: std::num::NonZeroU64) -> Self {
        PosInt(BigUint::from(v.get()))
    }
}

impl TryFrom<u64> for PosInt {
    type Error = Error;
    fn try_from(v: u64) -> Result<Self> {
        PosInt::from_u64(v)
    }
}

impl FromStr for PosInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Malformed(format!("not a decimal numeral: {s:?}")));
        }
        if s.len() > 1 && s.starts_with('0') {
            return Err(Error::Malformed(format!("leading zero in numeral: {s:?}")));
        }
        let v = BigUint::parse_bytes(s.as_bytes(), 10)
            .ok_or_else(|| Error::Malformed(format!("not a decimal numeral: {s:?}")))?;
        PosInt::new(v)
    }
}

impl fmt::Display for PosInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for PosInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for &PosInt {
    type Output = PosInt;
    fn add(self, rhs: &PosInt) -> PosInt {
        PosInt(&self.0 + &rhs.0)
    }
}

impl Mul for &PosInt {
    type Output = PosInt;
    fn mul(self, rhs: &PosInt) -> PosInt {
        PosInt(&self.0 * &rhs.0)
    }
}

impl Serialize for PosInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_str_radix(10))
    }
}

impl<'de> Deserialize<'de> for PosInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde helper for `u64` fields stored as decimal strings.
pub(crate) mod decimal_u64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        if s.is_empty() || (s.len() > 1 && s.starts_with('0')) || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(serde::de::Error::custom(format!("not a canonical decimal numeral: {s:?}")));
        }
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_and_junk() {
        assert!(PosInt::from_u64(0).is_err());
        assert!("0".parse::<PosInt>().is_err());
        assert!("-3".parse::<PosInt>().is_err());
        assert!("012".parse::<PosInt>().is_err());
        assert!("".parse::<PosInt>().is_err());
        assert_eq!("12".parse::<PosInt>().unwrap(), PosInt::lit(12));
    }

    #[test]
    fn digit_counts_at_powers_of_ten() {
        for e in [1u32, 2, 9, 10, 19, 20, 100, 1000] {
            let p = num_traits::pow(BigUint::from(10u32), e as usize);
            assert_eq!(decimal_digits(&p), e as usize + 1);
            let q = &p - 1u32;
            assert_eq!(decimal_digits(&q), e as usize);
            assert!(digits_at_most(&q, e as usize));
            assert!(!digits_at_most(&p, e as usize));
        }
    }

    #[test]
    fn serde_is_decimal_string() {
        let v: PosInt = "123456789012345678901234567890".parse().unwrap();
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "\"123456789012345678901234567890\"");
        let back: PosInt = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
