//! Value-ordered search for block sequences over a ground sequence.
//!
//! Picks are made one block at a time. At each step candidate values `v`
//! are tried in ascending order; a value is realized by the first block, in
//! (size, lexicographic) order, of unused positions summing to `v`. When the
//! subtree under a block fails, every other block for the same value whose
//! maximum is at least as large leaves a subset of the positions to the
//! children and must fail too, so the next block tried is the first one
//! lying strictly below that maximum.

use super::{Halt, Meter};
use crate::error::Error;

/// One chosen block: its value and its 0-based ground positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Pick {
    pub value: u64,
    pub block: Vec<usize>,
}

pub(crate) trait BlockFilter {
    /// Whether a block of value `v` may follow blocks with values `chosen`.
    fn admits(&mut self, chosen: &[u64], v: u64) -> Result<bool, Halt>;
}

pub(crate) struct BlockRun {
    pub picks: Option<Vec<Pick>>,
    /// Most blocks placed at once during the run.
    pub deepest: usize,
}

/// Largest DP table built while realizing a value.
const MAX_TABLE: usize = 256 << 20;

pub(crate) fn search_blocks(
    ground: &[u64],
    k: usize,
    cap: u64,
    filter: &mut dyn BlockFilter,
    meter: &mut Meter,
) -> Result<BlockRun, Halt> {
    let mut suffix = vec![0u64; ground.len() + 1];
    for i in (0..ground.len()).rev() {
        suffix[i] = suffix[i + 1] + ground[i];
    }
    let mut engine = Engine { ground, suffix, k, cap, filter, meter, values: Vec::new(), picks: Vec::new(), deepest: 0 };
    let found = matches!(engine.dfs(0)?, Step::Found);
    Ok(BlockRun { picks: found.then_some(engine.picks), deepest: engine.deepest })
}

enum Step {
    Found,
    /// `sensitive` is false when no value passed the filter, which no choice
    /// of earlier blocks' positions can change.
    Dead { sensitive: bool },
}

struct Engine<'a> {
    ground: &'a [u64],
    suffix: Vec<u64>,
    k: usize,
    cap: u64,
    filter: &'a mut dyn BlockFilter,
    meter: &'a mut Meter,
    values: Vec<u64>,
    picks: Vec<Pick>,
    deepest: usize,
}

impl Engine<'_> {
    fn dfs(&mut self, lo: usize) -> Result<Step, Halt> {
        if self.picks.len() == self.k {
            return Ok(Step::Found);
        }
        self.deepest = self.deepest.max(self.picks.len());
        let avail = self.suffix[lo];
        let mut admitted = false;
        for v in 1..=self.cap {
            if v > avail && admitted {
                break;
            }
            self.meter.tick()?;
            if !self.filter.admits(&self.values, v)? {
                continue;
            }
            admitted = true;
            if v > avail {
                break;
            }
            let mut bound = self.ground.len();
            while let Some(block) = first_block(self.ground, v, lo, bound)? {
                let top = *block.last().expect("nonempty block");
                self.values.push(v);
                self.picks.push(Pick { value: v, block });
                let step = self.dfs(top + 1)?;
                if let Step::Found = step {
                    return Ok(Step::Found);
                }
                self.values.pop();
                self.picks.pop();
                match step {
                    Step::Dead { sensitive: false } => break,
                    _ => bound = top,
                }
            }
        }
        Ok(Step::Dead { sensitive: admitted })
    }
}

/// First block of positions in `lo..bound` summing to `v`, by size and then
/// lexicographically.
pub(crate) fn first_block(ground: &[u64], v: u64, lo: usize, bound: usize) -> Result<Option<Vec<usize>>, Halt> {
    if lo >= bound {
        return Ok(None);
    }
    let items = &ground[lo..bound];
    if let Some(p) = items.iter().position(|&g| g == v) {
        return Ok(Some(vec![lo + p]));
    }
    if items.iter().sum::<u64>() < v {
        return Ok(None);
    }
    let width = v as usize + 1;
    let len = items.len();
    if (len + 1).saturating_mul(width) > MAX_TABLE {
        return Err(Halt::Error(Error::invalid(format!(
            "realizing value {v} over {len} terms exceeds the search table limit"
        ))));
    }
    const NONE: u8 = u8::MAX;
    // need[p * width + s]: fewest items from p.. summing to s
    let mut need = vec![NONE; (len + 1) * width];
    need[len * width] = 0;
    for p in (0..len).rev() {
        let a = items[p] as usize;
        for s in 0..width {
            let skip = need[(p + 1) * width + s];
            let take = if a <= s { need[(p + 1) * width + s - a].saturating_add(1) } else { NONE };
            need[p * width + s] = skip.min(take);
        }
    }
    let mut left = need[v as usize];
    if left == NONE {
        return Ok(None);
    }
    let (mut p, mut s) = (0usize, v as usize);
    let mut block = Vec::with_capacity(left as usize);
    while left > 0 {
        let q = (p..len)
            .find(|&q| {
                let a = items[q] as usize;
                a <= s && need[(q + 1) * width + s - a] == left - 1
            })
            .expect("table guarantees a completion");
        block.push(lo + q);
        s -= items[q] as usize;
        left -= 1;
        p = q + 1;
    }
    Ok(Some(block))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::SearchBudget;

    fn brute_first(ground: &[u64], v: u64, lo: usize, bound: usize) -> Option<Vec<usize>> {
        let n = bound - lo;
        let mut best: Option<Vec<usize>> = None;
        for mask in 1u32..1 << n {
            let block: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| lo + b).collect();
            if block.iter().map(|&i| ground[i]).sum::<u64>() != v {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => (block.len(), &block) < (b.len(), b),
            };
            if better {
                best = Some(block);
            }
        }
        best
    }

    #[test]
    fn first_block_matches_brute_force() {
        let ground = [3u64, 1, 4, 1, 5, 9, 2, 6, 5, 3];
        for lo in 0..ground.len() {
            for bound in lo + 1..=ground.len() {
                for v in 1..=40 {
                    assert_eq!(first_block(&ground, v, lo, bound).unwrap(), brute_first(&ground, v, lo, bound));
                }
            }
        }
    }

    struct Everything;
    impl BlockFilter for Everything {
        fn admits(&mut self, _: &[u64], _: u64) -> Result<bool, Halt> {
            Ok(true)
        }
    }

    #[test]
    fn unconstrained_search_takes_smallest_values() {
        let mut meter = Meter::new(&SearchBudget::default());
        let run = search_blocks(&[1, 2, 3, 4], 3, 10, &mut Everything, &mut meter).unwrap();
        let picks = run.picks.unwrap();
        assert_eq!(picks.iter().map(|p| p.value).collect::<Vec<_>>(), vec![1, 2, 3]);
    }
}
