//! Small-modulus number theory used by tower evaluation.

use std::collections::BTreeMap;

use num_integer::Integer;

/// `base^exp mod m` for `m >= 1`.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

pub fn factorize(m: u64) -> BTreeMap<u64, usize> {
    if m <= 1 {
        return BTreeMap::new();
    }
    num_prime::nt_funcs::factorize64(m)
}

/// Carmichael's function: the exponent of the unit group mod `m`.
pub fn carmichael(m: u64) -> u64 {
    factorize(m)
        .into_iter()
        .map(|(p, k)| {
            if p == 2 {
                match k {
                    1 => 1,
                    2 => 2,
                    _ => 1u64 << (k - 2),
                }
            } else {
                p.pow(k as u32 - 1) * (p - 1)
            }
        })
        .fold(1u64, |acc, x| acc.lcm(&x))
}

/// Exponent threshold and period for reducing huge exponents mod `m`.
///
/// For every base `a` and every `e >= lift`, `a^e ≡ a^(lift + (e - lift) mod period) (mod m)`.
/// The period is `λ(m)`; the lift is the least multiple of `λ(m)` that is at
/// least the largest prime-power exponent of `m`. For `m ∈ {8, 24}` the plain
/// `λ(m)` lift is too small (λ = 2 but 2³ | m), hence the rounding up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentReduction {
    pub period: u64,
    pub lift: u64,
}

pub fn exponent_reduction(m: u64) -> ExponentReduction {
    let fac = factorize(m);
    let max_k = fac.values().copied().max().unwrap_or(0) as u64;
    let period = carmichael(m);
    let lift = period * max_k.max(1).div_ceil(period);
    ExponentReduction { period, lift }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carmichael_small_values() {
        let expected = [
            (1, 1),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 4),
            (7, 6),
            (8, 2),
            (9, 6),
            (15, 4),
            (16, 4),
            (24, 2),
            (35, 12),
            (100, 20),
        ];
        for (m, l) in expected {
            assert_eq!(carmichael(m), l, "λ({m})");
        }
    }

    #[test]
    fn lift_covers_eight() {
        let r = exponent_reduction(8);
        assert_eq!(r.period, 2);
        assert!(r.lift >= 3);
        // the unrounded rule would claim 2^4 ≡ 2^2 (mod 8)
        for e in r.lift..40 {
            let reduced = r.lift + (e - r.lift) % r.period;
            assert_eq!(pow_mod(2, e, 8), pow_mod(2, reduced, 8));
        }
    }

    #[test]
    fn reduction_is_sound_for_small_moduli() {
        for m in 1..=200u64 {
            let r = exponent_reduction(m);
            for a in 0..m.max(2) {
                for e in r.lift..r.lift + 3 * r.period + 5 {
                    let reduced = r.lift + (e - r.lift) % r.period;
                    assert_eq!(pow_mod(a, e, m), pow_mod(a, reduced, m), "a={a} e={e} m={m}");
                }
            }
        }
    }
}
