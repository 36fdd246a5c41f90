use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::fsfp::{build_fs_fp, FsFpCertificate};
use crate::error::{Error, Result};
use crate::index::FiniteSeq;
use crate::oracle::{Membership, OracleSet, SetSpec};
use crate::pattern::{exp1, exp2, fp};
use crate::posint::PosInt;
use crate::search::{conclude, Halt, Meter, SearchBudget, SearchOutcome};
use crate::tower::{DigitBudget, TowerInt};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpOptions {
    /// Largest term considered.
    pub ceiling: u64,
    /// Length of the ground run `2, 3, …` used for the structure search.
    pub structure_terms: u64,
    pub structure_len: usize,
    pub digit_budget: DigitBudget,
}

impl Default for ExpOptions {
    fn default() -> Self {
        ExpOptions { ceiling: 1000, structure_terms: 64, structure_len: 3, digit_budget: DigitBudget::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    /// Scan upward from the previous term.
    Scan,
    /// A finite product of the stage's sum-and-product system.
    Structure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpStage {
    pub index: usize,
    /// Towers `b` of the earlier terms; a candidate `c` needs `b^c ∈ A` for each.
    pub bases: Vec<TowerInt>,
    pub structure: Option<FsFpCertificate>,
    pub source: CandidateSource,
    pub selected: PosInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpCertificate {
    pub oracle: OracleSet,
    pub digit_budget: DigitBudget,
    pub chosen: FiniteSeq,
    pub stages: Vec<ExpStage>,
    /// Both tower patterns of `chosen` up to its length, ascending.
    pub pattern: Vec<TowerInt>,
}

/// Both tower patterns of `x` up to depth `len(x)`.
pub fn exp_pattern(x: &FiniteSeq, digits: DigitBudget) -> Result<BTreeSet<TowerInt>> {
    let mut all = exp1(x, x.len(), digits)?;
    all.extend(exp2(x, x.len(), digits)?);
    Ok(all)
}

/// Search a strictly increasing `x_1 < … < x_m` in `[2..ceiling]` whose tower
/// patterns lie in `A`.
///
/// Term `j` must also lie in the log pullback of `A` along the towers of the
/// earlier terms. Products of a small sum-and-product system inside that
/// pullback are tried first, then every remaining value in order; each
/// candidate's full pattern is checked before descending, and dead ends
/// backtrack.
pub fn greedy_exp(a: &OracleSet, m: usize, budget: &SearchBudget, opts: &ExpOptions) -> Result<SearchOutcome<ExpCertificate>> {
    if m == 0 {
        return Err(Error::invalid("length must be >= 1"));
    }
    if opts.ceiling < 2 {
        return Err(Error::invalid("ceiling must be >= 2"));
    }
    let mut meter = Meter::new(budget);
    let mut g = Greedy { a, m, opts, cap: budget.value_cap(), meter: &mut meter, chosen: Vec::new(), stages: Vec::new() };
    let run = g.stage(1).and_then(|hit| {
        if !hit {
            return Ok(None);
        }
        let chosen = FiniteSeq::new(g.chosen.clone())?;
        let pattern = exp_pattern(&chosen, opts.digit_budget)?.into_iter().collect();
        Ok(Some(ExpCertificate {
            oracle: a.clone(),
            digit_budget: opts.digit_budget,
            chosen,
            stages: g.stages.clone(),
            pattern,
        }))
    });
    conclude(run, &meter, || format!("no {m} increasing terms up to {} with patterns in the set", opts.ceiling))
}

struct Greedy<'a> {
    a: &'a OracleSet,
    m: usize,
    opts: &'a ExpOptions,
    cap: u64,
    meter: &'a mut Meter,
    chosen: Vec<PosInt>,
    stages: Vec<ExpStage>,
}

impl Greedy<'_> {
    fn stage(&mut self, j: usize) -> std::result::Result<bool, Halt> {
        if j > self.m {
            return Ok(true);
        }
        let lo = match self.chosen.last() {
            None => 2,
            Some(prev) => prev.to_u64().expect("terms stay below the ceiling") + 1,
        };
        let digits = self.opts.digit_budget;
        let (bases, pullback, structure) = if j == 1 {
            (Vec::new(), None, None)
        } else {
            let prefix = FiniteSeq::new(self.chosen.clone())?;
            let bases: Vec<TowerInt> = exp2(&prefix, j - 1, digits)?.into_iter().collect();
            let b = SetSpec::log(self.a.clone(), bases.clone(), digits)?;
            let top = self.opts.ceiling.min(self.opts.structure_terms + 1).max(2);
            let ground = FiniteSeq::range(2, top)?;
            let ground_vals = ground.to_u64s().expect("small");
            let mut note = String::new();
            let cert = build_fs_fp(&b, &ground, &ground_vals, self.opts.structure_len, self.cap, self.meter, &mut note)?;
            (bases, Some(b), cert)
        };
        let favoured: BTreeSet<u64> = match &structure {
            Some(c) => fp(&c.chosen).iter().filter_map(PosInt::to_u64).filter(|&v| v >= lo && v <= self.opts.ceiling).collect(),
            None => BTreeSet::new(),
        };
        let rest = (lo..=self.opts.ceiling).filter(|v| !favoured.contains(v));
        let candidates: Vec<(u64, CandidateSource)> = favoured
            .iter()
            .map(|&v| (v, CandidateSource::Structure))
            .chain(rest.map(|v| (v, CandidateSource::Scan)))
            .collect();
        for (c, source) in candidates {
            self.meter.tick()?;
            if !self.a.eval_u64(c) {
                continue;
            }
            if let Some(b) = &pullback {
                if !b.contains_u64(c)? {
                    continue;
                }
            }
            let selected = PosInt::from_u64(c)?;
            self.chosen.push(selected.clone());
            let seq = FiniteSeq::new(self.chosen.clone())?;
            let mut fits = true;
            for t in exp_pattern(&seq, digits)? {
                if !self.a.eval_tower(&t)? {
                    fits = false;
                    break;
                }
            }
            if fits {
                self.stages.push(ExpStage { index: j, bases: bases.clone(), structure: structure.clone(), source, selected });
                if self.stage(j + 1)? {
                    return Ok(true);
                }
                self.stages.pop();
            }
            self.chosen.pop();
        }
        Ok(false)
    }
}
