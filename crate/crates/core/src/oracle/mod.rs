//! Membership oracles, set transforms and finite-scale refuters.

mod expr;
mod star;
mod transform;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::posint::PosInt;
use crate::tower::{DigitBudget, TowerInt};

pub use expr::{Expr, OracleSet, MAX_DEPTH};
pub use star::{
    aip_refute, check_witness, intersection_harness, log_star_check, mip_refute, IntersectionCertificate,
    LogStarReport, StarKind, StarReport, StarStatus,
};
pub use transform::{quotient_set, shift_set};

/// Anything that can answer `v ∈ A` for a positive integer `v`.
pub trait Membership {
    fn contains(&self, v: &PosInt) -> Result<bool>;

    fn contains_u64(&self, v: u64) -> Result<bool> {
        self.contains(&PosInt::from_u64(v)?)
    }
}

impl Membership for OracleSet {
    fn contains(&self, v: &PosInt) -> Result<bool> {
        Ok(self.eval(v))
    }

    fn contains_u64(&self, v: u64) -> Result<bool> {
        Ok(self.eval_u64(v))
    }
}

/// `{ m : b^m ∈ A for every base b }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogPullback {
    pub set: OracleSet,
    pub bases: Vec<TowerInt>,
    #[serde(default)]
    pub digit_budget: DigitBudget,
}

impl LogPullback {
    pub fn new(set: OracleSet, bases: Vec<TowerInt>, digit_budget: DigitBudget) -> Result<Self> {
        if bases.iter().any(|b| matches!(b, TowerInt::Exact(v) if v.is_one())) {
            return Err(Error::invalid("log pullback bases must be >= 2"));
        }
        Ok(LogPullback { set, bases, digit_budget })
    }
}

impl Membership for LogPullback {
    fn contains(&self, v: &PosInt) -> Result<bool> {
        let e = TowerInt::Exact(v.clone());
        for b in &self.bases {
            if !self.set.eval_tower(&TowerInt::pow(b, &e, self.digit_budget))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A set given either directly or as a logarithmic pullback.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    Predicate(OracleSet),
    Log { log_pullback: LogPullback },
}

impl SetSpec {
    pub fn log(set: OracleSet, bases: Vec<TowerInt>, digit_budget: DigitBudget) -> Result<Self> {
        Ok(SetSpec::Log { log_pullback: LogPullback::new(set, bases, digit_budget)? })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        crate::partition::parse_json(text)
    }
}

impl From<OracleSet> for SetSpec {
    fn from(o: OracleSet) -> Self {
        SetSpec::Predicate(o)
    }
}

impl Membership for SetSpec {
    fn contains(&self, v: &PosInt) -> Result<bool> {
        match self {
            SetSpec::Predicate(o) => o.contains(v),
            SetSpec::Log { log_pullback } => log_pullback.contains(v),
        }
    }

    fn contains_u64(&self, v: u64) -> Result<bool> {
        match self {
            SetSpec::Predicate(o) => o.contains_u64(v),
            SetSpec::Log { log_pullback } => log_pullback.contains_u64(v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_pullback_membership() {
        let a = OracleSet::mod_eq(7, 1).unwrap();
        let b = SetSpec::log(a, vec![TowerInt::lit(2)], DigitBudget::default()).unwrap();
        let got: Vec<u64> = (1..=12).filter(|&m| b.contains_u64(m).unwrap()).collect();
        assert_eq!(got, vec![3, 6, 9, 12]);
        let text = serde_json::to_string(&b).unwrap();
        assert_eq!(SetSpec::from_json(&text).unwrap(), b);
        assert!(SetSpec::log(OracleSet::everything(), vec![TowerInt::lit(1)], DigitBudget::default()).is_err());
    }
}
