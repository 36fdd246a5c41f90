//! Translates `A - y = { m : y + m ∈ A }` and quotients `A / y = { m : y·m ∈ A }`,
//! computed structurally on the expression tree.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::expr::{Expr, OracleSet};
use crate::error::Result;
use crate::posint::PosInt;

pub fn shift_set(a: &OracleSet, y: &PosInt) -> Result<OracleSet> {
    OracleSet::from_expr(shift(a.expr(), y))
}

pub fn quotient_set(a: &OracleSet, y: &PosInt) -> Result<OracleSet> {
    OracleSet::from_expr(quotient(a.expr(), y))
}

fn residue_of(y: &PosInt, m: u64) -> u64 {
    (y.value() % m).to_u64().expect("residue below a u64 modulus")
}

fn shift(e: &Expr, y: &PosInt) -> Expr {
    match e {
        Expr::ModEq { modulus, residue } => {
            let m = *modulus;
            let r = (residue + m - residue_of(y, m)) % m;
            Expr::ModEq { modulus: m, residue: r }
        }
        Expr::InSet { values } => Expr::InSet { values: values.iter().filter_map(|s| s.checked_sub(y)).collect() },
        Expr::Geq { threshold } => Expr::Geq { threshold: threshold.checked_sub(y).unwrap_or_else(PosInt::one) },
        Expr::And { args } => Expr::And { args: args.iter().map(|a| shift(a, y)).collect() },
        Expr::Or { args } => Expr::Or { args: args.iter().map(|a| shift(a, y)).collect() },
        Expr::Not { arg } => Expr::Not { arg: Box::new(shift(arg, y)) },
    }
}

fn quotient(e: &Expr, y: &PosInt) -> Expr {
    match e {
        Expr::ModEq { modulus, residue } => {
            // y·m ≡ r (mod M) is solvable iff g = gcd(y, M) divides r
            let m = *modulus;
            let yr = residue_of(y, m);
            let g = yr.gcd(&m);
            if residue % g != 0 {
                return Expr::InSet { values: Default::default() };
            }
            let m2 = m / g;
            let r2 = if m2 == 1 {
                0
            } else {
                let inv = mod_inverse((yr / g) % m2, m2);
                ((residue / g) as u128 * inv as u128 % m2 as u128) as u64
            };
            Expr::ModEq { modulus: m2, residue: r2 }
        }
        Expr::InSet { values } => Expr::InSet {
            values: values
                .iter()
                .filter_map(|s| {
                    let (q, r) = s.value().div_rem(y.value());
                    (r == BigUint::default()).then(|| PosInt::new(q).expect("positive quotient"))
                })
                .collect(),
        },
        Expr::Geq { threshold } => {
            let q = threshold.value().div_ceil(y.value());
            Expr::Geq { threshold: PosInt::new(q).unwrap_or_else(|_| PosInt::one()) }
        }
        Expr::And { args } => Expr::And { args: args.iter().map(|a| quotient(a, y)).collect() },
        Expr::Or { args } => Expr::Or { args: args.iter().map(|a| quotient(a, y)).collect() },
        Expr::Not { arg } => Expr::Not { arg: Box::new(quotient(arg, y)) },
    }
}

/// Inverse of `a` modulo `m` for coprime `a`, `m` with `m >= 2`.
fn mod_inverse(a: u64, m: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}
