//! Finite-scale refuters for additive and multiplicative largeness, the
//! logarithmic comparison, and the two-stage intersection harness.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{LogPullback, Membership, OracleSet, SetSpec};
use crate::error::{Error, Result};
use crate::index::{BlockSeq, FiniteSeq};
use crate::pattern::{fp, fs, sum_over};
use crate::posint::{decimal_u64, PosInt};
use crate::search::{
    conclude, ground_values, picks_to_blocks, search_blocks, Halt, Meter, SearchBudget, SearchOutcome, SearchStats,
    SubsystemCertificate, SumFilter,
};
use crate::tower::{DigitBudget, TowerInt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarKind {
    /// Strictly increasing terms whose finite sums avoid the set.
    Aip,
    /// Strictly increasing terms `>= 2` whose finite products avoid the set.
    Mip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarStatus {
    Refuted,
    ConsistentAtScale,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarReport {
    pub kind: StarKind,
    #[serde(with = "decimal_u64")]
    pub n_bound: u64,
    pub k: usize,
    pub status: StarStatus,
    pub witness: Option<FiniteSeq>,
    pub stats: SearchStats,
}

/// Search a length-`k` witness inside `[1..n]` whose finite sums all miss `A`.
pub fn aip_refute(a: &dyn Membership, n: u64, k: usize, budget: &SearchBudget) -> Result<StarReport> {
    refute(StarKind::Aip, a, n, k, budget)
}

/// Search a length-`k` witness inside `[2..n]` whose finite products all miss `A`.
pub fn mip_refute(a: &dyn Membership, n: u64, k: usize, budget: &SearchBudget) -> Result<StarReport> {
    refute(StarKind::Mip, a, n, k, budget)
}

fn refute(kind: StarKind, a: &dyn Membership, n: u64, k: usize, budget: &SearchBudget) -> Result<StarReport> {
    if k == 0 || k > 20 {
        return Err(Error::invalid(format!("witness length {k} outside 1..=20")));
    }
    if n == 0 {
        return Err(Error::invalid("scale N must be >= 1"));
    }
    let mut meter = Meter::new(budget);
    let mut w = Witness { kind, a, n, k, meter: &mut meter, terms: Vec::new(), patterns: Vec::new() };
    let run = w.dfs();
    let terms = w.terms;
    let (status, witness) = match run {
        Ok(true) => (StarStatus::Refuted, Some(FiniteSeq::from_u64s(&terms)?)),
        Ok(false) => (StarStatus::ConsistentAtScale, None),
        Err(Halt::Budget) => (StarStatus::BudgetExceeded, None),
        Err(Halt::Error(e)) => return Err(e),
    };
    Ok(StarReport { kind, n_bound: n, k, status, witness, stats: meter.stats() })
}

struct Witness<'a> {
    kind: StarKind,
    a: &'a dyn Membership,
    n: u64,
    k: usize,
    meter: &'a mut Meter,
    terms: Vec<u64>,
    /// Sums or products over nonempty subsets of `terms`, with repeats.
    patterns: Vec<u64>,
}

impl Witness<'_> {
    fn combine(&self, p: u64, v: u64) -> Option<u64> {
        match self.kind {
            StarKind::Aip => p.checked_add(v),
            StarKind::Mip => p.checked_mul(v),
        }
    }

    /// Smallest possible full pattern if `v` is next and the rest follow as
    /// `v+1, v+2, …`.
    fn too_big(&self, v: u64) -> bool {
        let rest = (self.k - self.terms.len()) as u64;
        let mut total: u128 = match self.kind {
            StarKind::Aip => self.terms.iter().map(|&t| t as u128).sum(),
            StarKind::Mip => self.terms.iter().map(|&t| t as u128).product(),
        };
        for j in 0..rest {
            let t = (v + j) as u128;
            total = match self.kind {
                StarKind::Aip => total + t,
                StarKind::Mip => total.saturating_mul(t),
            };
            if total > self.n as u128 {
                return true;
            }
        }
        false
    }

    fn dfs(&mut self) -> std::result::Result<bool, Halt> {
        if self.terms.len() == self.k {
            return Ok(true);
        }
        let first = match self.kind {
            StarKind::Aip => 1,
            StarKind::Mip => 2,
        };
        let start = self.terms.last().map_or(first, |&t| t + 1);
        for v in start..=self.n {
            if self.too_big(v) {
                break;
            }
            self.meter.tick()?;
            if self.a.contains_u64(v)? {
                continue;
            }
            let mut fresh = vec![v];
            let mut ok = true;
            for &p in &self.patterns {
                match self.combine(p, v) {
                    Some(q) if q <= self.n && !self.a.contains_u64(q)? => fresh.push(q),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let before = self.patterns.len();
            self.patterns.extend(fresh);
            self.terms.push(v);
            if self.dfs()? {
                return Ok(true);
            }
            self.terms.pop();
            self.patterns.truncate(before);
        }
        Ok(false)
    }
}

/// First problem with a claimed witness, if any.
pub fn check_witness(kind: StarKind, a: &dyn Membership, n: u64, witness: &FiniteSeq) -> Result<Option<String>> {
    let terms = witness.terms();
    if terms.windows(2).any(|w| w[0] >= w[1]) {
        return Ok(Some("witness is not strictly increasing".into()));
    }
    let (patterns, label) = match kind {
        StarKind::Aip => (fs(witness), "sum"),
        StarKind::Mip => {
            if terms[0].is_one() {
                return Ok(Some("multiplicative witness contains 1".into()));
            }
            (fp(witness), "product")
        }
    };
    let cap = BigUint::from(n);
    for p in patterns {
        if *p.value() > cap {
            return Ok(Some(format!("{label} {p} exceeds the scale {n}")));
        }
        if a.contains(&p)? {
            return Ok(Some(format!("{label} {p} lies in the set")));
        }
    }
    Ok(None)
}

/// Additive refutation of `log_n A` next to multiplicative refutation of `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogStarReport {
    pub base: PosInt,
    pub log_report: StarReport,
    pub mip_report: StarReport,
    /// The log set is refuted while `A` shows no multiplicative obstruction.
    pub counterexample_candidate: bool,
}

pub fn log_star_check(
    a: &OracleSet,
    base: &PosInt,
    n: u64,
    k: usize,
    budget: &SearchBudget,
    digits: DigitBudget,
) -> Result<LogStarReport> {
    let log = LogPullback::new(a.clone(), vec![TowerInt::Exact(base.clone())], digits)?;
    let log_report = aip_refute(&log, n, k, budget)?;
    let mip_report = mip_refute(a, n, k, budget)?;
    let counterexample_candidate =
        log_report.status == StarStatus::Refuted && mip_report.status == StarStatus::ConsistentAtScale;
    Ok(LogStarReport { base: base.clone(), log_report, mip_report, counterexample_candidate })
}

/// Two-stage extraction: a sum system in `A`, then one in `B` over it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectionCertificate {
    pub a: SetSpec,
    pub b: SetSpec,
    pub ground: FiniteSeq,
    /// Stage one over `ground` against `a`.
    pub outer: SubsystemCertificate,
    /// Stage two over `outer.chosen` against `b`.
    pub inner: SubsystemCertificate,
    /// Inner blocks composed down to `ground`.
    pub blocks: BlockSeq,
    pub chosen: FiniteSeq,
}

/// Combined filter: sums must lie in both sets.
struct Both<'a>(&'a dyn Membership, &'a dyn Membership);

impl Membership for Both<'_> {
    fn contains(&self, v: &PosInt) -> Result<bool> {
        Ok(self.0.contains(v)? && self.1.contains(v)?)
    }
    fn contains_u64(&self, v: u64) -> Result<bool> {
        Ok(self.0.contains_u64(v)? && self.1.contains_u64(v)?)
    }
}

pub fn intersection_harness(
    a: &SetSpec,
    b: &SetSpec,
    x: &FiniteSeq,
    k: usize,
    budget: &SearchBudget,
) -> Result<SearchOutcome<IntersectionCertificate>> {
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let ground = ground_values(x)?;
    let mut meter = Meter::new(budget);
    let run = harness(a, b, x, &ground, k, budget, &mut meter);
    conclude(run, &meter, || format!("no {k}-term sum system inside both sets"))
}

fn harness(
    a: &SetSpec,
    b: &SetSpec,
    x: &FiniteSeq,
    ground: &[u64],
    k: usize,
    budget: &SearchBudget,
    meter: &mut Meter,
) -> std::result::Result<Option<IntersectionCertificate>, Halt> {
    let cap = |g: &[u64]| budget.value_cap().min(g.iter().sum());
    // stage one takes extra room so stage two can still choose
    let outer_len = 3 * k;
    let outer = search_blocks(ground, outer_len, cap(ground), &mut SumFilter::new(a), meter)?;
    if let Some(picks) = outer.picks {
        let outer_blocks = picks_to_blocks(&picks)?;
        let outer_vals: Vec<u64> = picks.iter().map(|p| p.value).collect();
        let inner = search_blocks(&outer_vals, k, cap(&outer_vals), &mut SumFilter::new(b), meter)?;
        if let Some(inner_picks) = inner.picks {
            let y = sum_over(&outer_blocks, x)?;
            let inner_blocks = picks_to_blocks(&inner_picks)?;
            let composed = outer_blocks.compose(&inner_blocks)?;
            let chosen = sum_over(&composed, x)?;
            let outer_cert = SubsystemCertificate { oracle: a.clone(), ground: x.clone(), blocks: outer_blocks, chosen: y.clone() };
            let inner_cert = SubsystemCertificate { oracle: b.clone(), ground: y, blocks: inner_blocks, chosen: chosen.clone() };
            return Ok(Some(IntersectionCertificate {
                a: a.clone(),
                b: b.clone(),
                ground: x.clone(),
                outer: outer_cert,
                inner: inner_cert,
                blocks: composed,
                chosen,
            }));
        }
    }
    // direct search against both sets at once
    let both = Both(a, b);
    let direct = search_blocks(ground, k, cap(ground), &mut SumFilter::new(&both), meter)?;
    let Some(picks) = direct.picks else {
        return Ok(None);
    };
    let blocks = picks_to_blocks(&picks)?;
    let chosen = sum_over(&blocks, x)?;
    let outer = SubsystemCertificate { oracle: a.clone(), ground: x.clone(), blocks: blocks.clone(), chosen: chosen.clone() };
    let inner = SubsystemCertificate {
        oracle: b.clone(),
        ground: chosen.clone(),
        blocks: BlockSeq::identity(chosen.len())?,
        chosen: chosen.clone(),
    };
    Ok(Some(IntersectionCertificate { a: a.clone(), b: b.clone(), ground: x.clone(), outer, inner, blocks, chosen }))
}
