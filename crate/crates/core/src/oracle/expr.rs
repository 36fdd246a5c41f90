use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::posint::{decimal_u64, PosInt};
use crate::tower::TowerInt;

/// Maximum nesting depth of an oracle expression.
pub const MAX_DEPTH: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Expr {
    ModEq {
        #[serde(with = "decimal_u64")]
        modulus: u64,
        #[serde(with = "decimal_u64")]
        residue: u64,
    },
    InSet {
        #[serde(with = "ascending")]
        values: BTreeSet<PosInt>,
    },
    Geq {
        threshold: PosInt,
    },
    And {
        args: Vec<Expr>,
    },
    Or {
        args: Vec<Expr>,
    },
    Not {
        arg: Box<Expr>,
    },
}

mod ascending {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BTreeSet<PosInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeSet<PosInt>, D::Error> {
        let v = Vec::<PosInt>::deserialize(d)?;
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(serde::de::Error::custom("in_set values must be strictly ascending"));
        }
        Ok(v.into_iter().collect())
    }
}

impl Expr {
    fn depth(&self) -> usize {
        match self {
            Expr::ModEq { .. } | Expr::InSet { .. } | Expr::Geq { .. } => 1,
            Expr::And { args } | Expr::Or { args } => 1 + args.iter().map(Expr::depth).max().unwrap_or(0),
            Expr::Not { arg } => 1 + arg.depth(),
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            Expr::ModEq { modulus, residue } => {
                if *modulus == 0 {
                    return Err(Error::invalid("modulus must be >= 1"));
                }
                if residue >= modulus {
                    return Err(Error::invalid(format!("residue {residue} is not below modulus {modulus}")));
                }
                Ok(())
            }
            Expr::InSet { .. } | Expr::Geq { .. } => Ok(()),
            Expr::And { args } | Expr::Or { args } => args.iter().try_for_each(Expr::check),
            Expr::Not { arg } => arg.check(),
        }
    }

    fn eval(&self, v: &BigUint) -> bool {
        match self {
            Expr::ModEq { modulus, residue } => v % *modulus == BigUint::from(*residue),
            Expr::InSet { values } => values.iter().any(|s| s.value() == v),
            Expr::Geq { threshold } => v >= threshold.value(),
            Expr::And { args } => args.iter().all(|e| e.eval(v)),
            Expr::Or { args } => args.iter().any(|e| e.eval(v)),
            Expr::Not { arg } => !arg.eval(v),
        }
    }

    fn eval_u64(&self, v: u64) -> bool {
        match self {
            Expr::ModEq { modulus, residue } => v % modulus == *residue,
            Expr::InSet { values } => values.contains(&PosInt::lit(v)),
            Expr::Geq { threshold } => threshold.to_u64().is_some_and(|t| v >= t),
            Expr::And { args } => args.iter().all(|e| e.eval_u64(v)),
            Expr::Or { args } => args.iter().any(|e| e.eval_u64(v)),
            Expr::Not { arg } => !arg.eval_u64(v),
        }
    }

    fn eval_tower(&self, t: &TowerInt) -> Result<bool> {
        match self {
            Expr::ModEq { modulus, residue } => Ok(t.mod_u64(*modulus) == *residue),
            Expr::InSet { values } => match values.last() {
                None => Ok(false),
                Some(top) if t.cmp_exact(top) == Some(std::cmp::Ordering::Greater) => Ok(false),
                Some(_) => Err(Error::UnsupportedQuery(format!("cannot decide membership of {t} in a finite set"))),
            },
            Expr::Geq { threshold } => match t.cmp_exact(threshold) {
                Some(ord) => Ok(ord != std::cmp::Ordering::Less),
                None => Err(Error::UnsupportedQuery(format!("cannot compare {t} with {threshold}"))),
            },
            Expr::And { args } => {
                for e in args {
                    if !e.eval_tower(t)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Expr::Or { args } => {
                for e in args {
                    if e.eval_tower(t)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Expr::Not { arg } => Ok(!arg.eval_tower(t)?),
        }
    }
}

/// A validated membership predicate on the positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Expr", into = "Expr")]
pub struct OracleSet(Expr);

impl TryFrom<Expr> for OracleSet {
    type Error = Error;
    fn try_from(e: Expr) -> Result<Self> {
        OracleSet::from_expr(e)
    }
}

impl From<OracleSet> for Expr {
    fn from(o: OracleSet) -> Self {
        o.0
    }
}

impl OracleSet {
    pub fn from_expr(e: Expr) -> Result<Self> {
        if e.depth() > MAX_DEPTH {
            return Err(Error::invalid(format!("oracle nesting exceeds depth {MAX_DEPTH}")));
        }
        e.check()?;
        Ok(OracleSet(e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        crate::partition::parse_json(text)
    }

    /// Canonical compact JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("oracle serializes")
    }

    pub fn expr(&self) -> &Expr {
        &self.0
    }

    /// `{ v : v ≡ residue (mod modulus) }`.
    pub fn mod_eq(modulus: u64, residue: u64) -> Result<Self> {
        Self::from_expr(Expr::ModEq { modulus, residue })
    }

    /// `{ v : m | v }`.
    pub fn multiples_of(m: u64) -> Result<Self> {
        Self::mod_eq(m, 0)
    }

    pub fn in_set(values: impl IntoIterator<Item = PosInt>) -> Self {
        OracleSet(Expr::InSet { values: values.into_iter().collect() })
    }

    pub fn geq(threshold: PosInt) -> Self {
        OracleSet(Expr::Geq { threshold })
    }

    pub fn everything() -> Self {
        Self::geq(PosInt::one())
    }

    pub fn nothing() -> Self {
        Self::in_set([])
    }

    pub fn and(parts: Vec<OracleSet>) -> Result<Self> {
        Self::from_expr(Expr::And { args: parts.into_iter().map(|p| p.0).collect() })
    }

    pub fn or(parts: Vec<OracleSet>) -> Result<Self> {
        Self::from_expr(Expr::Or { args: parts.into_iter().map(|p| p.0).collect() })
    }

    pub fn negate(self) -> Result<Self> {
        Self::from_expr(Expr::Not { arg: Box::new(self.0) })
    }

    pub fn eval(&self, v: &PosInt) -> bool {
        match v.to_u64() {
            Some(small) => self.0.eval_u64(small),
            None => self.0.eval(v.value()),
        }
    }

    pub fn eval_u64(&self, v: u64) -> bool {
        self.0.eval_u64(v)
    }

    /// Membership of a possibly symbolic value. Atoms that cannot be decided
    /// on a symbolic tower yield [`Error::UnsupportedQuery`].
    pub fn eval_tower(&self, t: &TowerInt) -> Result<bool> {
        match t {
            TowerInt::Exact(v) => Ok(self.eval(v)),
            TowerInt::Power { .. } => self.0.eval_tower(t),
        }
    }
}

impl fmt::Display for OracleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}
