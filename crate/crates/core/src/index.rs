//! Finite index sets, finite sequences and block sequences.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::posint::PosInt;

/// A nonempty finite set of indices `>= 1`, stored ascending.
///
/// `Ord` is lexicographic on the sorted elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::invalid("index set must be nonempty"));
        }
        if v[0] == 0 {
            return Err(Error::invalid("indices start at 1"));
        }
        Ok(IndexSet(v))
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet::new([i]).expect("singleton index must be >= 1")
    }

    /// Bit `i - 1` set for each index `i`. Requires `max <= 64`.
    pub fn from_mask(mask: u64) -> Result<Self> {
        IndexSet::new((0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1))
    }

    pub fn to_mask(&self) -> Option<u64> {
        if self.max_elem() > 64 {
            return None;
        }
        Some(self.0.iter().fold(0u64, |m, &i| m | 1 << (i - 1)))
    }

    pub fn min_elem(&self) -> usize {
        self.0[0]
    }

    pub fn max_elem(&self) -> usize {
        *self.0.last().expect("nonempty")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        while let (Some(x), Some(y)) = (a.peek(), b.peek()) {
            match x.cmp(y) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet::new(self.iter().chain(other.iter())).expect("union of nonempty sets")
    }

    /// Key of the search order: by maximum element, then lexicographically.
    pub fn search_key(&self) -> (usize, &[usize]) {
        (self.max_elem(), &self.0)
    }
}

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed("index set must be strictly ascending".into()));
        }
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A nonempty sequence `x_1, …, x_n` of positive integers. Terms may repeat.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<PosInt>", into = "Vec<PosInt>")]
pub struct FiniteSeq(Vec<PosInt>);

impl FiniteSeq {
    pub fn new(terms: Vec<PosInt>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("sequence must be nonempty"));
        }
        Ok(FiniteSeq(terms))
    }

    pub fn from_u64s(terms: &[u64]) -> Result<Self> {
        Self::new(terms.iter().map(|&t| PosInt::from_u64(t)).collect::<Result<_>>()?)
    }

    /// `x_n = n` for `n` in `a..=b`.
    pub fn range(a: u64, b: u64) -> Result<Self> {
        if a == 0 || a > b {
            return Err(Error::invalid(format!("bad range {a}..{b}")));
        }
        Self::from_u64s(&(a..=b).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn terms(&self) -> &[PosInt] {
        &self.0
    }

    /// Term at 1-based position `i`.
    pub fn get(&self, i: usize) -> Option<&PosInt> {
        i.checked_sub(1).and_then(|j| self.0.get(j))
    }

    pub fn iter(&self) -> impl Iterator<Item = &PosInt> {
        self.0.iter()
    }

    /// Terms as `u64`, if they all fit.
    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.0.iter().map(PosInt::to_u64).collect()
    }
}

impl TryFrom<Vec<PosInt>> for FiniteSeq {
    type Error = Error;
    fn try_from(v: Vec<PosInt>) -> Result<Self> {
        FiniteSeq::new(v)
    }
}

impl From<FiniteSeq> for Vec<PosInt> {
    fn from(s: FiniteSeq) -> Self {
        s.0
    }
}

impl fmt::Debug for FiniteSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Index sets `H_1, H_2, …` with `max H_i < min H_{i+1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<IndexSet>", into = "Vec<IndexSet>")]
pub struct BlockSeq(Vec<IndexSet>);

impl BlockSeq {
    pub fn new(blocks: Vec<IndexSet>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("block sequence must be nonempty"));
        }
        for (n, w) in blocks.windows(2).enumerate() {
            if w[0].max_elem() >= w[1].min_elem() {
                return Err(Error::invalid(format!(
                    "blocks {} and {} are not ordered: max {} >= min {}",
                    n + 1,
                    n + 2,
                    w[0].max_elem(),
                    w[1].min_elem()
                )));
            }
        }
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if !blocks[i].is_disjoint(&blocks[j]) {
                    return Err(Error::invalid(format!("blocks {} and {} overlap", i + 1, j + 1)));
                }
            }
        }
        Ok(BlockSeq(blocks))
    }

    /// `{1}, {2}, …, {n}`.
    pub fn identity(n: usize) -> Result<Self> {
        BlockSeq::new((1..=n).map(IndexSet::singleton).collect())
    }

    pub fn blocks(&self) -> &[IndexSet] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = &IndexSet> {
        self.0.iter()
    }

    /// Blocks `G_n = ∪_{s ∈ K_n} H_s` for `self = H` and `selection = K`.
    pub fn compose(&self, selection: &BlockSeq) -> Result<BlockSeq> {
        let mut out = Vec::with_capacity(selection.len());
        for kn in selection.iter() {
            let mut members = Vec::new();
            for s in kn.iter() {
                let h = self
                    .0
                    .get(s - 1)
                    .ok_or_else(|| Error::invalid(format!("selection index {s} beyond {} blocks", self.len())))?;
                members.extend(h.iter());
            }
            out.push(IndexSet::new(members)?);
        }
        BlockSeq::new(out)
    }
}

impl TryFrom<Vec<IndexSet>> for BlockSeq {
    type Error = Error;
    fn try_from(v: Vec<IndexSet>) -> Result<Self> {
        BlockSeq::new(v)
    }
}

impl From<BlockSeq> for Vec<IndexSet> {
    fn from(b: BlockSeq) -> Self {
        b.0
    }
}

impl fmt::Debug for BlockSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_set_invariants() {
        assert!(IndexSet::new([]).is_err());
        assert!(IndexSet::new([0, 1]).is_err());
        let s = IndexSet::new([3, 1, 3]).unwrap();
        assert_eq!(s.as_slice(), &[1, 3]);
        assert!(serde_json::from_str::<IndexSet>("[3,1]").is_err());
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,3]");
        assert_eq!(IndexSet::from_mask(0b101).unwrap(), s);
        assert_eq!(s.to_mask(), Some(0b101));
    }

    #[test]
    fn block_order_enforced() {
        let b = |v: &[usize]| IndexSet::new(v.iter().copied()).unwrap();
        assert!(BlockSeq::new(vec![b(&[1, 2]), b(&[4])]).is_ok());
        assert!(BlockSeq::new(vec![b(&[1, 5]), b(&[3])]).is_err());
        assert!(BlockSeq::new(vec![b(&[2]), b(&[2])]).is_err());
        assert!(BlockSeq::new(vec![]).is_err());
    }

    #[test]
    fn search_key_orders_by_max_first() {
        let a = IndexSet::new([1, 2, 3]).unwrap();
        let b = IndexSet::new([4]).unwrap();
        let c = IndexSet::new([1, 4]).unwrap();
        assert!(a.search_key() < c.search_key());
        assert!(c.search_key() < b.search_key());
        // lexicographic Ord disagrees
        assert!(c < b && a < c);
    }
}
