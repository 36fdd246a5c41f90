use serde::{Deserialize, Serialize};

use super::blocks::{search_blocks, BlockFilter, Pick};
use super::{conclude, Halt, Meter, SearchBudget, SearchOutcome};
use crate::error::{Error, Result};
use crate::index::{BlockSeq, FiniteSeq, IndexSet};
use crate::oracle::{Membership, SetSpec};
use crate::pattern::sum_over;

/// Blocks `H` over `ground` with `FS(y) ⊆ A` for `y_n = Σ_{t ∈ H_n} ground_t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsystemCertificate {
    pub oracle: SetSpec,
    pub ground: FiniteSeq,
    pub blocks: BlockSeq,
    pub chosen: FiniteSeq,
}

/// Ground terms as `u64`, with their total also fitting.
pub(crate) fn ground_values(x: &FiniteSeq) -> Result<Vec<u64>> {
    let vals = x.to_u64s().ok_or_else(|| Error::invalid("search ground terms must fit in 64 bits"))?;
    vals.iter()
        .try_fold(0u64, |acc, &v| acc.checked_add(v))
        .ok_or_else(|| Error::invalid("search ground total must fit in 64 bits"))?;
    Ok(vals)
}

/// Distinct nonempty subset sums, ascending.
pub(crate) fn fs_sums(vals: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for &v in vals {
        let shifted: Vec<u64> = out.iter().map(|s| s + v).collect();
        out.extend(shifted);
        out.push(v);
        out.sort_unstable();
        out.dedup();
    }
    out
}

/// Admits `v` when `v` and every `s + v` for `s ∈ FS(chosen)` lie in the set.
pub(crate) struct SumFilter<'a> {
    set: &'a dyn Membership,
    key: Vec<u64>,
    sums: Vec<u64>,
}

impl<'a> SumFilter<'a> {
    pub(crate) fn new(set: &'a dyn Membership) -> Self {
        SumFilter { set, key: Vec::new(), sums: Vec::new() }
    }
}

impl BlockFilter for SumFilter<'_> {
    fn admits(&mut self, chosen: &[u64], v: u64) -> std::result::Result<bool, Halt> {
        if self.key != chosen {
            self.key = chosen.to_vec();
            self.sums = fs_sums(chosen);
        }
        if !self.set.contains_u64(v)? {
            return Ok(false);
        }
        for &s in &self.sums {
            if !self.set.contains_u64(s + v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn picks_to_blocks(picks: &[Pick]) -> Result<BlockSeq> {
    BlockSeq::new(
        picks
            .iter()
            .map(|p| IndexSet::new(p.block.iter().map(|i| i + 1)))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Search `k` ordered blocks of `x` whose sums have all finite sums in `A`.
///
/// Block values are bounded by `min(budget.max_value, Σ x)`.
pub fn extract_in_star(
    a: &SetSpec,
    x: &FiniteSeq,
    k: usize,
    budget: &SearchBudget,
) -> Result<SearchOutcome<SubsystemCertificate>> {
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let ground = ground_values(x)?;
    let cap = budget.value_cap().min(ground.iter().sum());
    let mut meter = Meter::new(budget);
    let mut filter = SumFilter::new(a);
    let mut deepest = 0;
    let run = search_blocks(&ground, k, cap, &mut filter, &mut meter).and_then(|r| {
        deepest = r.deepest;
        match r.picks {
            None => Ok(None),
            Some(picks) => {
                let blocks = picks_to_blocks(&picks)?;
                let chosen = sum_over(&blocks, x)?;
                Ok(Some(SubsystemCertificate { oracle: a.clone(), ground: x.clone(), blocks, chosen }))
            }
        }
    });
    conclude(run, &meter, || format!("no {k} blocks; deepest partial system had {deepest} blocks"))
}
