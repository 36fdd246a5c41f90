use serde::{Deserialize, Serialize};

use super::{conclude, Halt, Meter, SearchBudget, SearchOutcome};
use crate::error::{Error, Result};
use crate::index::{BlockSeq, FiniteSeq, IndexSet};
use crate::partition::{check_total_on_subsets, pullback_coloring, Color, Coloring};
use crate::pattern::sum_over;
use crate::posint::PosInt;

/// Largest subset universe searched by mask.
pub const MAX_FU_UNIVERSE: usize = 20;

/// Pairwise disjoint sets whose unions all share one color.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuCertificate {
    pub m: usize,
    pub ordered: bool,
    pub sets: Vec<IndexSet>,
    pub color: Color,
}

/// Blocks over a superincreasing `z` whose sums have monochromatic finite sums.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FsSubsystemCertificate {
    pub z: FiniteSeq,
    pub blocks: BlockSeq,
    pub chosen: FiniteSeq,
    pub color: Color,
}

/// Search `k` pairwise disjoint nonempty subsets of `[1..m]` with a
/// monochromatic union closure. Candidates go by maximum element, then
/// lexicographically; with `ordered`, each set must start above the previous
/// set's maximum.
pub fn fu_search(
    c: &Coloring<IndexSet>,
    m: usize,
    k: usize,
    ordered: bool,
    budget: &SearchBudget,
) -> Result<SearchOutcome<FuCertificate>> {
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    if m > MAX_FU_UNIVERSE {
        return Err(Error::invalid(format!("universe [1..{m}] exceeds the limit of {MAX_FU_UNIVERSE}")));
    }
    check_total_on_subsets(c, m)?;
    let mut colors = vec![0 as Color; 1 << m];
    for (set, color) in c.iter() {
        colors[set.to_mask().expect("checked universe") as usize] = color;
    }
    let mut order: Vec<IndexSet> = (1u64..1 << m).map(|mask| IndexSet::from_mask(mask).expect("nonzero")).collect();
    order.sort_by(|a, b| a.search_key().cmp(&b.search_key()));
    let order: Vec<u32> = order.iter().map(|s| s.to_mask().expect("small") as u32).collect();

    let mut meter = Meter::new(budget);
    let mut dfs = FuDfs { colors: &colors, order: &order, k, ordered, meter: &mut meter, chosen: Vec::new(), unions: Vec::new() };
    let run = dfs.run(0, 0, 0).map(|hit| {
        hit.then(|| FuCertificate {
            m,
            ordered,
            sets: dfs.chosen.iter().map(|&s| IndexSet::from_mask(s as u64).expect("nonzero")).collect(),
            color: colors[dfs.chosen[0] as usize],
        })
    });
    conclude(run, &meter, || format!("no {k} disjoint sets in [1..{m}] with monochromatic unions"))
}

struct FuDfs<'a> {
    colors: &'a [Color],
    order: &'a [u32],
    k: usize,
    ordered: bool,
    meter: &'a mut Meter,
    chosen: Vec<u32>,
    unions: Vec<u32>,
}

impl FuDfs<'_> {
    fn run(&mut self, start: usize, used: u32, color: Color) -> std::result::Result<bool, Halt> {
        if self.chosen.len() == self.k {
            return Ok(true);
        }
        for pos in start..self.order.len() {
            let s = self.order[pos];
            if s & used != 0 {
                continue;
            }
            if self.ordered {
                if let Some(&last) = self.chosen.last() {
                    if s.trailing_zeros() <= 31 - last.leading_zeros() {
                        continue;
                    }
                }
            }
            self.meter.tick()?;
            let c = self.colors[s as usize];
            if color != 0 && c != color {
                continue;
            }
            if self.unions.iter().any(|&u| self.colors[(u | s) as usize] != c) {
                continue;
            }
            let before = self.unions.len();
            for i in 0..before {
                let u = self.unions[i] | s;
                self.unions.push(u);
            }
            self.unions.push(s);
            self.chosen.push(s);
            if self.run(pos + 1, used | s, c)? {
                return Ok(true);
            }
            self.chosen.pop();
            self.unions.truncate(before);
        }
        Ok(false)
    }
}

/// Pull `c` back along a superincreasing `z` and search ordered unions there.
pub fn fs_subsystem_search(
    c: &Coloring<PosInt>,
    z: &FiniteSeq,
    k: usize,
    budget: &SearchBudget,
) -> Result<SearchOutcome<FsSubsystemCertificate>> {
    if z.len() > MAX_FU_UNIVERSE {
        return Err(Error::invalid(format!("sequence longer than {MAX_FU_UNIVERSE} terms")));
    }
    let pulled = pullback_coloring(c, z)?;
    let out = fu_search(&pulled, z.len(), k, true, budget)?;
    let stats = out.stats();
    match out.status() {
        super::SearchStatus::Found => {
            let cert = out.into_certificate().expect("found");
            let blocks = BlockSeq::new(cert.sets)?;
            let chosen = sum_over(&blocks, z)?;
            Ok(SearchOutcome::found(FsSubsystemCertificate { z: z.clone(), blocks, chosen, color: cert.color }, stats))
        }
        _ => Ok(out.map(|_| unreachable!("no certificate without a find"))),
    }
}

/// Every `k`-block system over `z` (any `z`, up to 12 terms) whose finite
/// sums are monochromatic, by brute-force labelling of positions. Sorted by
/// the blocks' (max, lexicographic) keys.
pub fn brute_oracle_fs(c: &Coloring<PosInt>, z: &FiniteSeq, k: usize) -> Result<Vec<FsSubsystemCertificate>> {
    if z.len() > 12 {
        return Err(Error::invalid("brute-force oracle is limited to 12 terms"));
    }
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let mut found = Vec::new();
    let mut labels = vec![0usize; z.len()];
    label(c, z, k, 0, 0, &mut labels, &mut found)?;
    found.sort_by(|a: &FsSubsystemCertificate, b| {
        let ka: Vec<_> = a.blocks.iter().map(IndexSet::search_key).collect();
        let kb: Vec<_> = b.blocks.iter().map(IndexSet::search_key).collect();
        ka.cmp(&kb)
    });
    Ok(found)
}

fn label(
    c: &Coloring<PosInt>,
    z: &FiniteSeq,
    k: usize,
    pos: usize,
    current: usize,
    labels: &mut [usize],
    found: &mut Vec<FsSubsystemCertificate>,
) -> Result<()> {
    if pos == labels.len() {
        if current == k {
            if let Some(cert) = check_labels(c, z, k, labels)? {
                found.push(cert);
            }
        }
        return Ok(());
    }
    // 0 skips the position; `current` extends the open block; `current + 1` opens the next
    let mut options = vec![0];
    if current >= 1 {
        options.push(current);
    }
    if current < k {
        options.push(current + 1);
    }
    for l in options {
        labels[pos] = l;
        label(c, z, k, pos + 1, current.max(l), labels, found)?;
    }
    labels[pos] = 0;
    Ok(())
}

fn check_labels(c: &Coloring<PosInt>, z: &FiniteSeq, k: usize, labels: &[usize]) -> Result<Option<FsSubsystemCertificate>> {
    let blocks = (1..=k)
        .map(|b| IndexSet::new(labels.iter().enumerate().filter(|(_, &l)| l == b).map(|(i, _)| i + 1)))
        .collect::<Result<Vec<_>>>()?;
    let blocks = BlockSeq::new(blocks)?;
    let chosen = sum_over(&blocks, z)?;
    let mut color = None;
    for sum in crate::pattern::fs(&chosen) {
        let got = c.color(&sum).ok_or_else(|| Error::invalid(format!("coloring is not defined at {sum}")))?;
        match color {
            None => color = Some(got),
            Some(prev) if prev != got => return Ok(None),
            Some(_) => {}
        }
    }
    Ok(Some(FsSubsystemCertificate { z: z.clone(), blocks, chosen, color: color.expect("nonempty sums") }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::SearchStatus;

    fn subsets_coloring(m: usize, r: u32, f: impl Fn(&IndexSet) -> Color) -> Coloring<IndexSet> {
        Coloring::from_fn(r, (1u64..1 << m).map(|x| IndexSet::from_mask(x).unwrap()), f).unwrap()
    }

    fn values_coloring(upto: u64, r: u32, f: impl Fn(u64) -> Color) -> Coloring<PosInt> {
        Coloring::from_fn(r, (1..=upto).map(PosInt::lit), |v| f(v.to_u64().unwrap())).unwrap()
    }

    #[test]
    fn fu_search_examples() {
        let b = SearchBudget::default();
        let constant = subsets_coloring(2, 1, |_| 1);
        let out = fu_search(&constant, 2, 2, false, &b).unwrap();
        assert_eq!(out.certificate().unwrap().sets, vec![IndexSet::singleton(1), IndexSet::singleton(2)]);

        // singletons are the odd color out, so two sets need two elements each
        let by_size = |m| subsets_coloring(m, 2, |s| if s.len() == 1 { 1 } else { 2 });
        assert_eq!(fu_search(&by_size(3), 3, 2, false, &b).unwrap().status(), SearchStatus::Exhausted);
        let out = fu_search(&by_size(4), 4, 2, false, &b).unwrap();
        assert_eq!(out.certificate().unwrap().sets, vec![IndexSet::new([1, 2]).unwrap(), IndexSet::new([3, 4]).unwrap()]);

        let out = fu_search(&constant, 2, 3, false, &b).unwrap();
        assert_eq!(out.status(), SearchStatus::Exhausted);

        let partial = Coloring::new(1, [(IndexSet::singleton(1), 1)].into()).unwrap();
        assert!(fu_search(&partial, 2, 1, false, &b).is_err());
    }

    #[test]
    fn tiny_budget_is_reported() {
        let c = subsets_coloring(6, 2, |s| (s.len() % 2) as Color + 1);
        let out = fu_search(&c, 6, 6, false, &SearchBudget::default().with_nodes(5)).unwrap();
        assert_eq!(out.status(), SearchStatus::BudgetExceeded);
    }

    #[test]
    fn fs_subsystem_example() {
        let z = FiniteSeq::from_u64s(&[1, 2, 4, 8]).unwrap();
        let c = values_coloring(15, 2, |v| if v % 2 == 0 { 1 } else { 2 });
        let out = fs_subsystem_search(&c, &z, 2, &SearchBudget::default()).unwrap();
        let cert = out.certificate().unwrap();
        assert_eq!(cert.chosen, FiniteSeq::from_u64s(&[2, 4]).unwrap());
        assert_eq!(cert.color, 1);
    }

    #[test]
    fn brute_oracle_agrees_with_search_on_first_hit() {
        let z = FiniteSeq::from_u64s(&[1, 2, 4, 8]).unwrap();
        let c = values_coloring(15, 3, |v| (v % 3) as Color + 1);
        let all = brute_oracle_fs(&c, &z, 2).unwrap();
        let out = fs_subsystem_search(&c, &z, 2, &SearchBudget::default()).unwrap();
        assert_eq!(out.certificate(), all.first());
    }

    #[test]
    fn brute_oracle_counts_constant_coloring() {
        let z = FiniteSeq::from_u64s(&[1, 2, 4]).unwrap();
        let c = values_coloring(7, 1, |_| 1);
        // ({1},{2}) ({1},{3}) ({2},{3}) ({1},{2,3}) ({1,2},{3})
        assert_eq!(brute_oracle_fs(&c, &z, 2).unwrap().len(), 5);
    }
}
