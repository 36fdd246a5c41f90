//! Two small Ramsey-type numbers computed by exhaustive search.

use serde::{Deserialize, Serialize};

use super::fu::fu_search;
use super::SearchBudget;
use crate::error::{Error, Result};
use crate::index::IndexSet;
use crate::partition::{Color, Coloring};

/// Least `n` such that every `r`-coloring of `[1..n]` has `x < y` of one
/// color with `x + y` of that color too.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakSchurResult {
    pub r: u32,
    pub number: u64,
    /// Colors of `1..number-1` with no such triple.
    pub avoiding: Vec<Color>,
    pub nodes: u64,
}

/// First `(x, y)` with `x < y`, `x + y <= len` and all three colored alike.
pub fn find_sum_triple(colors: &[Color]) -> Option<(u64, u64)> {
    let n = colors.len();
    for s in 3..=n {
        for x in 1..s.div_ceil(2) {
            let y = s - x;
            let c = colors[s - 1];
            if colors[x - 1] == c && colors[y - 1] == c {
                return Some((x as u64, y as u64));
            }
        }
    }
    None
}

pub fn weak_schur_number(r: u32) -> Result<WeakSchurResult> {
    if !(1..=3).contains(&r) {
        return Err(Error::invalid(format!("weak Schur search supports 1..=3 colors, got {r}")));
    }
    let mut s = Schur { r, colors: Vec::new(), best: Vec::new(), nodes: 0 };
    s.extend(0);
    let number = s.best.len() as u64 + 1;
    Ok(WeakSchurResult { r, number, avoiding: s.best, nodes: s.nodes })
}

struct Schur {
    r: u32,
    colors: Vec<Color>,
    best: Vec<Color>,
    nodes: u64,
}

impl Schur {
    /// Colors are introduced in order of first use, which removes the
    /// relabelling symmetry.
    fn extend(&mut self, used: Color) {
        if self.colors.len() > self.best.len() {
            self.best = self.colors.clone();
        }
        let n = self.colors.len() + 1;
        for c in 1..=self.r.min(used + 1) {
            self.nodes += 1;
            let clash = (1..n.div_ceil(2)).any(|x| self.colors[x - 1] == c && self.colors[n - x - 1] == c);
            if clash {
                continue;
            }
            self.colors.push(c);
            self.extend(used.max(c));
            self.colors.pop();
        }
    }
}

/// Least `m` such that every `r`-coloring of the nonempty subsets of
/// `[1..m]` has `k` pairwise disjoint sets with monochromatic unions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FolkmanResult {
    pub r: u32,
    pub k: usize,
    pub number: usize,
    /// An avoiding coloring on `[1..number-1]`, when that universe is nonempty.
    pub avoiding: Option<Coloring<IndexSet>>,
    pub nodes: u64,
}

/// Supported parameters: `r = 1` with `k <= 16`, any `r` with `k = 1`, or
/// `r = k = 2`.
pub fn folkman_union_number(r: u32, k: usize) -> Result<FolkmanResult> {
    let supported = r >= 1 && k >= 1 && (r == 1 && k <= 16 || k == 1 || r == 2 && k == 2);
    if !supported {
        return Err(Error::invalid(format!("union-number search does not support r={r}, k={k}")));
    }
    let mut nodes = 0;
    let mut previous: Option<Coloring<IndexSet>> = None;
    for m in 1..=16usize {
        match avoiding_coloring(r, k, m, &mut nodes)? {
            Some(c) => previous = Some(c),
            None => return Ok(FolkmanResult { r, k, number: m, avoiding: previous, nodes }),
        }
    }
    Err(Error::invalid("union number exceeds the searched range"))
}

fn avoiding_coloring(r: u32, k: usize, m: usize, nodes: &mut u64) -> Result<Option<Coloring<IndexSet>>> {
    let universe = || (1u64..1 << m).map(|mask| IndexSet::from_mask(mask).expect("nonzero"));
    if r == 1 || k == 1 {
        // k = 1 is met by any single set; one color only fails when m < k
        let candidate = Coloring::from_fn(r, universe(), |_| 1)?;
        let out = fu_search(&candidate, m, k, false, &SearchBudget::default())?;
        *nodes += out.stats().nodes;
        return Ok((!out.is_found()).then_some(candidate));
    }
    // r = 2, k = 2: no disjoint S, T with S, T, S ∪ T all one color
    let total = (1usize << m) - 1;
    let mut colors = vec![0 as Color; total + 1];
    let masks: Vec<usize> = (1..=total).collect();
    if pair_dfs(&masks, 0, &mut colors, 0, nodes) {
        let c = Coloring::from_fn(r, universe(), |s| colors[s.to_mask().expect("small") as usize])?;
        return Ok(Some(c));
    }
    Ok(None)
}

fn pair_dfs(masks: &[usize], pos: usize, colors: &mut [Color], used: Color, nodes: &mut u64) -> bool {
    let Some(&u) = masks.get(pos) else {
        return true;
    };
    for c in 1..=2.min(used + 1) {
        *nodes += 1;
        // every split of u into two disjoint nonempty parts, both already colored
        let mut s = (u - 1) & u;
        let mut clash = false;
        while s > 0 {
            let t = u ^ s;
            if colors[s] == c && colors[t] == c {
                clash = true;
                break;
            }
            s = (s - 1) & u;
        }
        if clash {
            continue;
        }
        colors[u] = c;
        if pair_dfs(masks, pos + 1, colors, used.max(c), nodes) {
            return true;
        }
        colors[u] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weak_schur_small() {
        let one = weak_schur_number(1).unwrap();
        assert_eq!(one.number, 3);
        let two = weak_schur_number(2).unwrap();
        assert_eq!(two.number, 9);
        assert_eq!(find_sum_triple(&two.avoiding), None);
        assert!(weak_schur_number(4).is_err());
    }

    #[test]
    fn union_numbers() {
        assert_eq!(folkman_union_number(1, 3).unwrap().number, 3);
        assert_eq!(folkman_union_number(3, 1).unwrap().number, 1);
        let two = folkman_union_number(2, 2).unwrap();
        assert_eq!(two.number, 5);
        assert_eq!(two.avoiding.as_ref().unwrap().len(), 15);
        assert!(folkman_union_number(3, 2).is_err());
    }

    #[test]
    fn triple_finder() {
        assert_eq!(find_sum_triple(&[1, 1, 1]), Some((1, 2)));
        // 1 + 1 = 2 does not count: x and y must differ
        assert_eq!(find_sum_triple(&[1, 1, 2]), None);
    }
}
