//! Power towers: exact when small, symbolic `base^exp` otherwise.
//!
//! A [`TowerInt`] is materialized exactly whenever its decimal expansion fits
//! the [`DigitBudget`]. Larger values stay symbolic and are only ever reduced
//! modulo small integers or compared by magnitude.
//!
//! Symbolic values are kept in a normal form where possible: an exact base is
//! replaced by its primitive root (`64^e` becomes `2^(6e)`) and nested powers
//! with an exact inner exponent are flattened (`(2^a)^b` becomes `2^(ab)`).
//! Two towers in normal form with equal values compare equal; forms that the
//! normalization cannot reach keep their original shape.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::modular::{exponent_reduction, pow_mod};
use crate::posint::{digits_at_most, PosInt};

/// Maximum decimal digits for an exactly materialized tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DigitBudget(pub usize);

impl Default for DigitBudget {
    fn default() -> Self {
        DigitBudget(10_000)
    }
}

/// Bases above this many bits skip perfect-power normalization.
const ROOT_SEARCH_BITS: u64 = 4096;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TowerInt {
    Exact(PosInt),
    Power { base: Box<TowerInt>, exp: Box<TowerInt> },
}

impl TowerInt {
    pub fn exact(v: PosInt) -> Self {
        TowerInt::Exact(v)
    }

    pub fn lit(v: u64) -> Self {
        TowerInt::Exact(PosInt::lit(v))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, TowerInt::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&PosInt> {
        match self {
            TowerInt::Exact(v) => Some(v),
            TowerInt::Power { .. } => None,
        }
    }

    fn is_one(&self) -> bool {
        matches!(self, TowerInt::Exact(v) if v.is_one())
    }

    /// `base^exp`, exact when it fits `budget`, normalized symbolic otherwise.
    pub fn pow(base: &TowerInt, exp: &TowerInt, budget: DigitBudget) -> TowerInt {
        if base.is_one() || exp.is_one() {
            return base.clone();
        }
        if let (TowerInt::Exact(a), TowerInt::Exact(e)) = (base, exp) {
            if let Some(v) = exact_pow(a.value(), e.value(), budget.0) {
                return TowerInt::Exact(PosInt::new(v).expect("power of a positive integer"));
            }
        }
        let (root, mult) = match base {
            TowerInt::Exact(a) => {
                let (r, j) = primitive_root(a.value());
                (
                    TowerInt::Exact(PosInt::new(r).expect("root of a positive integer")),
                    TowerInt::Exact(PosInt::new(j).expect("positive multiplicity")),
                )
            }
            TowerInt::Power { base, exp } => ((**base).clone(), (**exp).clone()),
        };
        match mul_exponents(&mult, exp) {
            Some(e) => TowerInt::Power { base: Box::new(root), exp: Box::new(e) },
            None => TowerInt::Power { base: Box::new(base.clone()), exp: Box::new(exp.clone()) },
        }
    }

    /// The exact value when it is below `cap`.
    pub fn value_below(&self, cap: u128) -> Option<u128> {
        match self {
            TowerInt::Exact(v) => v.value().to_u128().filter(|x| *x < cap),
            TowerInt::Power { base, exp } => {
                let b = base.value_below(cap)?;
                if b <= 1 {
                    return (b < cap).then_some(b);
                }
                let e = exp.value_below(129)? as u32;
                b.checked_pow(e).filter(|x| *x < cap)
            }
        }
    }

    /// Residue modulo `m >= 1`, computed without materializing the tower.
    pub fn mod_u64(&self, m: u64) -> u64 {
        assert!(m >= 1, "modulus must be positive");
        if m == 1 {
            return 0;
        }
        match self {
            TowerInt::Exact(v) => (v.value() % m).to_u64().expect("residue below a u64 modulus"),
            TowerInt::Power { base, exp } => {
                let b = base.mod_u64(m);
                let red = exponent_reduction(m);
                let e = match exp.value_below(red.lift as u128) {
                    Some(small) => small as u64,
                    None => red.lift + exp.mod_u64(red.period),
                };
                pow_mod(b, e, m)
            }
        }
    }

    /// Approximate base-10 logarithm; `inf` for astronomically large towers.
    pub fn log10_approx(&self) -> f64 {
        match self {
            TowerInt::Exact(v) => log10_big(v.value()),
            TowerInt::Power { base, exp } => {
                let lb = base.log10_approx();
                let e = 10f64.powf(exp.log10_approx());
                e * lb
            }
        }
    }

    /// Compare with an exact integer. `None` when the magnitude estimate is
    /// too coarse and the tower is too large to materialize.
    pub fn cmp_exact(&self, other: &PosInt) -> Option<Ordering> {
        if let TowerInt::Exact(v) = self {
            return Some(v.cmp(other));
        }
        let est = self.log10_approx();
        let digits = other.digits() as f64;
        if est.is_infinite() || est > (digits + 1.0) * (1.0 + 1e-9) {
            return Some(Ordering::Greater);
        }
        self.exact_value(200_000).map(|v| v.cmp(other.value()))
    }

    /// Materialize the value if it has at most `max_digits` digits.
    pub fn exact_value(&self, max_digits: usize) -> Option<BigUint> {
        match self {
            TowerInt::Exact(v) => Some(v.value().clone()),
            TowerInt::Power { base, exp } => {
                let b = base.exact_value(max_digits)?;
                let e = exp.exact_value(max_digits)?;
                exact_pow(&b, &e, max_digits)
            }
        }
    }
}

fn log10_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        v.to_f64().expect("fits f64").log10()
    } else {
        let shift = bits - 64;
        let top = (v >> shift).to_f64().expect("64-bit prefix");
        top.log10() + shift as f64 * std::f64::consts::LOG10_2
    }
}

fn exact_pow(a: &BigUint, e: &BigUint, budget: usize) -> Option<BigUint> {
    if a.is_one() {
        return Some(BigUint::one());
    }
    let e = e.to_u64()?;
    let est = e as f64 * log10_big(a);
    if est > budget as f64 + 1.0 {
        return None;
    }
    let v = num_traits::pow(a.clone(), e as usize);
    digits_at_most(&v, budget).then_some(v)
}

fn mul_exponents(j: &TowerInt, e: &TowerInt) -> Option<TowerInt> {
    use TowerInt::*;
    if j.is_one() {
        return Some(e.clone());
    }
    if e.is_one() {
        return Some(j.clone());
    }
    match (j, e) {
        (Exact(a), Exact(b)) => Some(Exact(a * b)),
        (Exact(a), Power { base, exp }) | (Power { base, exp }, Exact(a)) => {
            let s = base.as_exact()?;
            let g = exp.as_exact()?;
            let t = exact_log(a.value(), s.value())?;
            let g = PosInt::new(g.value() + t).expect("positive exponent");
            Some(Power { base: base.clone(), exp: Box::new(Exact(g)) })
        }
        _ => None,
    }
}

/// `t` with `a == s^t`, if any.
fn exact_log(a: &BigUint, s: &BigUint) -> Option<u64> {
    if *s <= BigUint::one() {
        return None;
    }
    let mut cur = a.clone();
    let mut t = 0u64;
    while cur > BigUint::one() {
        if &cur % s != BigUint::from(0u32) {
            return None;
        }
        cur /= s;
        t += 1;
    }
    Some(t)
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = ROOT_SEARCH_BITS as usize + 1;
        let mut sieve = vec![true; n + 1];
        let mut out = Vec::new();
        for i in 2..=n {
            if sieve[i] {
                out.push(i as u32);
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
        }
        out
    })
}

/// `(r, j)` with `a == r^j` and `r` not a perfect power.
fn primitive_root(a: &BigUint) -> (BigUint, BigUint) {
    let mut cur = a.clone();
    let mut mult = BigUint::one();
    if cur.bits() > ROOT_SEARCH_BITS || cur <= BigUint::one() {
        return (cur, mult);
    }
    'outer: loop {
        let bits = cur.bits();
        for &p in small_primes() {
            if p as u64 > bits {
                break;
            }
            let r = cur.nth_root(p);
            if r > BigUint::one() && num_traits::pow(r.clone(), p as usize) == cur {
                cur = r;
                mult *= p;
                continue 'outer;
            }
        }
        return (cur, mult);
    }
}

impl From<PosInt> for TowerInt {
    fn from(v: PosInt) -> Self {
        TowerInt::Exact(v)
    }
}

impl fmt::Display for TowerInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerInt::Exact(v) => write!(f, "{v}"),
            TowerInt::Power { base, exp } => {
                let wrap = |t: &TowerInt| match t {
                    TowerInt::Exact(v) => v.to_string(),
                    p => format!("({p})"),
                };
                write!(f, "{}^{}", wrap(base), wrap(exp))
            }
        }
    }
}

impl fmt::Debug for TowerInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> DigitBudget {
        DigitBudget(5)
    }

    #[test]
    fn exact_when_within_budget() {
        let t = TowerInt::pow(&TowerInt::lit(2), &TowerInt::lit(10), small());
        assert_eq!(t, TowerInt::lit(1024));
        // 2^20 = 1048576 has 7 digits
        let t = TowerInt::pow(&TowerInt::lit(2), &TowerInt::lit(20), small());
        assert!(!t.is_exact());
        assert_eq!(t.exact_value(100).unwrap(), BigUint::from(1u64 << 20));
        // exactly at the budget boundary: 99999 vs 100000
        let t = TowerInt::pow(&TowerInt::lit(10), &TowerInt::lit(5), small());
        assert!(!t.is_exact());
        let t = TowerInt::pow(&TowerInt::lit(10), &TowerInt::lit(4), small());
        assert_eq!(t, TowerInt::lit(10_000));
    }

    #[test]
    fn base_one_absorbs() {
        let big = TowerInt::pow(&TowerInt::lit(7), &TowerInt::lit(1000), small());
        assert_eq!(TowerInt::pow(&TowerInt::lit(1), &big, small()), TowerInt::lit(1));
    }

    #[test]
    fn normalization_identifies_equal_values() {
        let b = small();
        // 4^(2^15) and 2^(2^16) are the same number
        let lhs = TowerInt::pow(&TowerInt::lit(4), &TowerInt::lit(1 << 15), b);
        let rhs = TowerInt::pow(&TowerInt::lit(2), &TowerInt::lit(1 << 16), b);
        assert_eq!(lhs, rhs);
        // (2^20)^3 vs 8^20
        let inner = TowerInt::pow(&TowerInt::lit(2), &TowerInt::lit(20), b);
        let lhs = TowerInt::pow(&inner, &TowerInt::lit(3), b);
        let rhs = TowerInt::pow(&TowerInt::lit(8), &TowerInt::lit(20), b);
        assert_eq!(lhs, rhs);
        // 4^(2^(2^20)) = 2^(2^(2^20 + 1))
        let e = TowerInt::pow(&TowerInt::lit(2), &TowerInt::lit(1 << 20), b);
        let lhs = TowerInt::pow(&TowerInt::lit(4), &e, b);
        let e2 = TowerInt::pow(&TowerInt::lit(2), &TowerInt::lit((1 << 20) + 1), b);
        let rhs = TowerInt::pow(&TowerInt::lit(2), &e2, b);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn spec_modular_examples() {
        let b = DigitBudget::default();
        let t = TowerInt::pow(&TowerInt::lit(2), &TowerInt::pow(&TowerInt::lit(3), &TowerInt::lit(2), b), b);
        assert_eq!(t.mod_u64(10), 2);
        assert_eq!(t.mod_u64(1), 0);
        let t = TowerInt::pow(&TowerInt::lit(5), &TowerInt::pow(&TowerInt::lit(5), &TowerInt::lit(5), b), b);
        assert_eq!(t.mod_u64(5), 0);
        let small = DigitBudget(50);
        let t = TowerInt::pow(&TowerInt::lit(5), &TowerInt::pow(&TowerInt::lit(5), &TowerInt::lit(5), small), small);
        assert!(!t.is_exact());
        assert_eq!(t.mod_u64(5), 0);
    }

    #[test]
    fn symbolic_mod_matches_exact() {
        let b = DigitBudget(3);
        for base in 2..12u64 {
            for e in [5u64, 17, 40, 77] {
                let t = TowerInt::pow(&TowerInt::lit(base), &TowerInt::lit(e), b);
                let exact = num_traits::pow(BigUint::from(base), e as usize);
                for m in [1u64, 2, 7, 8, 12, 24, 64, 97, 360, 1000, 65536] {
                    assert_eq!(BigUint::from(t.mod_u64(m)), &exact % m, "{base}^{e} mod {m}");
                }
            }
        }
    }

    #[test]
    fn magnitude_comparison() {
        let t = TowerInt::pow(&TowerInt::lit(3), &TowerInt::lit(1000), DigitBudget(10));
        assert_eq!(t.cmp_exact(&PosInt::lit(u64::MAX)), Some(Ordering::Greater));
        let exact = PosInt::new(num_traits::pow(BigUint::from(3u32), 1000)).unwrap();
        assert_eq!(t.cmp_exact(&exact), Some(Ordering::Equal));
        let bigger = &exact + &PosInt::one();
        assert_eq!(t.cmp_exact(&bigger), Some(Ordering::Less));
    }

    #[test]
    fn serde_shapes() {
        let b = DigitBudget(3);
        let t = TowerInt::pow(&TowerInt::lit(3), &TowerInt::lit(27), b);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"base":"3","exp":"27"}"#);
        let back: TowerInt = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert_eq!(serde_json::to_string(&TowerInt::lit(9)).unwrap(), "\"9\"");
    }
}
