//! Colorings of finite universes and the tools that move them between
//! integers and index sets.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::index::{BlockSeq, FiniteSeq, IndexSet};
use crate::posint::PosInt;

pub type Color = u32;

/// Keys of a coloring file: decimal strings for integers, JSON arrays for
/// index sets.
pub trait ColorKey: Ord + Clone + Sized {
    fn to_key(&self) -> String;
    fn from_key(s: &str) -> Result<Self>;
}

impl ColorKey for PosInt {
    fn to_key(&self) -> String {
        self.to_string()
    }
    fn from_key(s: &str) -> Result<Self> {
        s.parse()
    }
}

impl ColorKey for IndexSet {
    fn to_key(&self) -> String {
        serde_json::to_string(self).expect("index sets serialize")
    }
    fn from_key(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(format!("bad index-set key {s:?}: {e}")))
    }
}

/// A total `r`-coloring of a finite universe. Colors are `1..=r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring<K: Ord> {
    r: u32,
    assign: BTreeMap<K, Color>,
}

impl<K: Ord + Clone> Coloring<K> {
    pub fn new(r: u32, assign: BTreeMap<K, Color>) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("a coloring needs at least one color"));
        }
        if let Some(bad) = assign.values().find(|&&c| c == 0 || c > r) {
            return Err(Error::invalid(format!("color {bad} outside 1..={r}")));
        }
        Ok(Coloring { r, assign })
    }

    pub fn from_fn(r: u32, universe: impl IntoIterator<Item = K>, mut f: impl FnMut(&K) -> Color) -> Result<Self> {
        let assign = universe.into_iter().map(|k| {
            let c = f(&k);
            (k, c)
        });
        Self::new(r, assign.collect())
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn color(&self, key: &K) -> Option<Color> {
        self.assign.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, Color)> {
        self.assign.iter().map(|(k, &c)| (k, c))
    }
}

impl<K: ColorKey> Serialize for Coloring<K> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let assign: BTreeMap<String, Color> = self.assign.iter().map(|(k, &c)| (k.to_key(), c)).collect();
        ColoringSpec::Explicit { r: self.r, assign }.serialize(s)
    }
}

impl<'de, K: ColorKey> Deserialize<'de> for Coloring<K> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ColoringSpec::deserialize(d)? {
            ColoringSpec::Explicit { r, assign } => {
                let map = assign
                    .iter()
                    .map(|(k, &c)| K::from_key(k).map(|k| (k, c)))
                    .collect::<Result<BTreeMap<_, _>>>()
                    .map_err(serde::de::Error::custom)?;
                Coloring::new(r, map).map_err(serde::de::Error::custom)
            }
            ColoringSpec::Rule { .. } => Err(serde::de::Error::custom("expected an explicit coloring")),
        }
    }
}

/// A decimal numeral given either as a JSON string or a JSON integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Numeral {
    Text(String),
    Int(u64),
}

impl Numeral {
    fn value(&self) -> Result<u64> {
        match self {
            Numeral::Int(v) => Ok(*v),
            Numeral::Text(s) => s.parse().map_err(|_| Error::Malformed(format!("bad numeral {s:?}"))),
        }
    }
}

/// On-disk coloring: an explicit map or a residue rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColoringSpec {
    Rule { r: u32, rule: ColorRule },
    Explicit { r: u32, assign: BTreeMap<String, Color> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ColorRule {
    Mod { modulus: Numeral, classes: BTreeMap<String, Color> },
}

impl ColoringSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    /// Materialize on a set of integers. Fails if some value is uncolored.
    pub fn on_values(&self, universe: impl IntoIterator<Item = PosInt>) -> Result<Coloring<PosInt>> {
        let mut assign = BTreeMap::new();
        match self {
            ColoringSpec::Explicit { r, assign: map } => {
                let parsed = map
                    .iter()
                    .map(|(k, &c)| PosInt::from_key(k).map(|k| (k, c)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                for v in universe {
                    let c = parsed
                        .get(&v)
                        .ok_or_else(|| Error::invalid(format!("coloring does not cover {v}")))?;
                    assign.insert(v, *c);
                }
                Coloring::new(*r, assign)
            }
            ColoringSpec::Rule { r, rule: ColorRule::Mod { modulus, classes } } => {
                let m = modulus.value()?;
                if m == 0 {
                    return Err(Error::invalid("modulus must be >= 1"));
                }
                let classes = classes
                    .iter()
                    .map(|(k, &c)| k.parse::<u64>().map(|k| (k, c)))
                    .collect::<std::result::Result<BTreeMap<_, _>, _>>()
                    .map_err(|e| Error::Malformed(format!("bad residue key: {e}")))?;
                for v in universe {
                    let res = (v.value() % m).try_into().unwrap_or(0u64);
                    let c = classes
                        .get(&res)
                        .ok_or_else(|| Error::invalid(format!("rule has no color for residue {res} (value {v})")))?;
                    assign.insert(v, *c);
                }
                Coloring::new(*r, assign)
            }
        }
    }

    /// Materialize on every nonempty subset of `[1..m]` (explicit maps only).
    pub fn on_subsets(&self, m: usize) -> Result<Coloring<IndexSet>> {
        let ColoringSpec::Explicit { r, assign } = self else {
            return Err(Error::invalid("index-set colorings must be explicit"));
        };
        let parsed = assign
            .iter()
            .map(|(k, &c)| IndexSet::from_key(k).map(|k| (k, c)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let coloring = Coloring::new(*r, parsed)?;
        check_total_on_subsets(&coloring, m)?;
        Ok(coloring)
    }
}

pub(crate) fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::Malformed(format!("line {}, column {}: {e}", e.line(), e.column())))
}

/// Every nonempty subset of `[1..m]` colored, nothing else.
pub(crate) fn check_total_on_subsets(c: &Coloring<IndexSet>, m: usize) -> Result<()> {
    if m == 0 || m > 24 {
        return Err(Error::invalid(format!("subset universe size {m} outside 1..=24")));
    }
    let expected = (1usize << m) - 1;
    if let Some((k, _)) = c.iter().find(|(k, _)| k.max_elem() > m) {
        return Err(Error::invalid(format!("coloring mentions {k} outside [1..{m}]")));
    }
    if c.len() != expected {
        return Err(Error::invalid(format!(
            "coloring covers {} of the {expected} nonempty subsets of [1..{m}]",
            c.len()
        )));
    }
    Ok(())
}

/// Greedy first-fit superincreasing selection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperincreasingSelection {
    pub source: FiniteSeq,
    pub chosen: FiniteSeq,
    /// 1-based positions in `source`.
    pub provenance: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "selection", rename_all = "snake_case")]
pub enum SelectionOutcome {
    Complete(SuperincreasingSelection),
    /// The longest prefix the greedy pass could build.
    Exhausted(SuperincreasingSelection),
}

impl SelectionOutcome {
    pub fn selection(&self) -> &SuperincreasingSelection {
        match self {
            SelectionOutcome::Complete(s) | SelectionOutcome::Exhausted(s) => s,
        }
    }
}

/// Each term exceeds the sum of all earlier terms.
pub fn is_superincreasing(z: &FiniteSeq) -> bool {
    let mut total = num_bigint::BigUint::default();
    for t in z.iter() {
        if *t.value() <= total {
            return false;
        }
        total += t.value();
    }
    true
}

pub fn superincreasing_subseq(x: &FiniteSeq, len: usize) -> Result<SelectionOutcome> {
    if len == 0 {
        return Err(Error::invalid("selection length must be >= 1"));
    }
    let mut total = num_bigint::BigUint::default();
    let mut chosen = Vec::new();
    let mut provenance = Vec::new();
    for (i, t) in x.iter().enumerate() {
        if chosen.len() == len {
            break;
        }
        if *t.value() > total {
            total += t.value();
            chosen.push(t.clone());
            provenance.push(i + 1);
        }
    }
    let complete = chosen.len() == len;
    let sel = SuperincreasingSelection { source: x.clone(), chosen: FiniteSeq::new(chosen)?, provenance };
    Ok(if complete { SelectionOutcome::Complete(sel) } else { SelectionOutcome::Exhausted(sel) })
}

/// `color(A) = c(Σ_{t ∈ A} z_t)` on every nonempty `A ⊆ [1..len z]`.
pub fn pullback_coloring(c: &Coloring<PosInt>, z: &FiniteSeq) -> Result<Coloring<IndexSet>> {
    if !is_superincreasing(z) {
        return Err(Error::invalid("pullback needs a superincreasing sequence"));
    }
    let n = z.len();
    if n > 24 {
        return Err(Error::invalid(format!("sequence of length {n} is too long to pull back")));
    }
    let mut assign = BTreeMap::new();
    for mask in 1u64..1 << n {
        let set = IndexSet::from_mask(mask)?;
        let sum = set.iter().map(|t| z.terms()[t - 1].value()).sum::<num_bigint::BigUint>();
        let sum = PosInt::new(sum)?;
        let color = c
            .color(&sum)
            .ok_or_else(|| Error::invalid(format!("coloring is not defined at sum {sum}")))?;
        assign.insert(set, color);
    }
    Coloring::new(c.r(), assign)
}

/// Greedy max<min chain: the first member, then repeatedly the earliest
/// member whose minimum exceeds the current maximum.
pub fn order_blocks(family: &[IndexSet]) -> Result<BlockSeq> {
    let first = family.first().ok_or_else(|| Error::invalid("family must be nonempty"))?;
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if !family[i].is_disjoint(&family[j]) {
                return Err(Error::invalid(format!("{} and {} overlap", family[i], family[j])));
            }
        }
    }
    let mut chain = vec![first.clone()];
    while let Some(next) = family.iter().find(|h| h.min_elem() > chain.last().expect("nonempty").max_elem()) {
        chain.push(next.clone());
    }
    BlockSeq::new(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[u64]) -> FiniteSeq {
        FiniteSeq::from_u64s(v).unwrap()
    }

    fn iset(v: &[usize]) -> IndexSet {
        IndexSet::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn superincreasing_examples() {
        let x = FiniteSeq::range(1, 20).unwrap();
        let out = superincreasing_subseq(&x, 4).unwrap();
        assert!(matches!(out, SelectionOutcome::Complete(_)));
        assert_eq!(out.selection().chosen, seq(&[1, 2, 4, 8]));
        assert_eq!(out.selection().provenance, vec![1, 2, 4, 8]);

        let out = superincreasing_subseq(&seq(&[5]), 1).unwrap();
        assert_eq!(out, SelectionOutcome::Complete(SuperincreasingSelection {
            source: seq(&[5]),
            chosen: seq(&[5]),
            provenance: vec![1],
        }));

        let out = superincreasing_subseq(&seq(&[3, 3, 3]), 2).unwrap();
        assert!(matches!(out, SelectionOutcome::Exhausted(_)));
        assert_eq!(out.selection().chosen.len(), 1);

        assert!(superincreasing_subseq(&seq(&[1]), 0).is_err());
    }

    #[test]
    fn pullback_examples() {
        let z = seq(&[1, 2, 4]);
        let universe: Vec<PosInt> = (1..=7).map(PosInt::lit).collect();
        let parity = Coloring::from_fn(2, universe.clone(), |s| if s.to_u64().unwrap() % 2 == 0 { 1 } else { 2 }).unwrap();
        let pb = pullback_coloring(&parity, &z).unwrap();
        assert_eq!(pb.len(), 7);
        assert_eq!(pb.color(&iset(&[2])), Some(1));
        assert_eq!(pb.color(&iset(&[1, 2])), Some(2));

        let constant = Coloring::from_fn(1, universe.clone(), |_| 1).unwrap();
        assert!(pullback_coloring(&constant, &z).unwrap().iter().all(|(_, c)| c == 1));

        let mod3 = Coloring::from_fn(3, universe, |s| (s.to_u64().unwrap() % 3) as u32 + 1).unwrap();
        let pb = pullback_coloring(&mod3, &z).unwrap();
        assert_eq!(pb.color(&iset(&[1, 2, 3])), mod3.color(&PosInt::lit(7)));

        assert!(pullback_coloring(&parity, &seq(&[1, 1])).is_err());
    }

    #[test]
    fn order_blocks_examples() {
        let fam = [iset(&[1, 5]), iset(&[2, 3]), iset(&[7, 9]), iset(&[4, 8])];
        let chain = order_blocks(&fam).unwrap();
        assert_eq!(chain.blocks(), &[iset(&[1, 5]), iset(&[7, 9])]);

        let fam = [iset(&[1]), iset(&[2]), iset(&[3])];
        assert_eq!(order_blocks(&fam).unwrap().blocks(), &fam);

        let fam = [iset(&[2, 6]), iset(&[1, 9])];
        assert_eq!(order_blocks(&fam).unwrap().blocks(), &[iset(&[2, 6])]);

        assert!(order_blocks(&[iset(&[1, 2]), iset(&[2, 3])]).is_err());
        assert!(order_blocks(&[]).is_err());
    }

    #[test]
    fn coloring_files() {
        let spec = ColoringSpec::from_json(r#"{"r": 2, "rule": {"type": "mod", "modulus": "2", "classes": {"0": 1, "1": 2}}}"#).unwrap();
        let c = spec.on_values((1..=4).map(PosInt::lit)).unwrap();
        assert_eq!(c.color(&PosInt::lit(3)), Some(2));

        let spec = ColoringSpec::from_json(r#"{"r": 1, "assign": {"[1]": 1, "[2]": 1, "[1,2]": 1}}"#).unwrap();
        assert_eq!(spec.on_subsets(2).unwrap().len(), 3);
        assert!(spec.on_subsets(3).is_err());

        let bad = ColoringSpec::from_json(r#"{"r": 2, "assign": {"5": 3}}"#).unwrap();
        assert!(bad.on_values([PosInt::lit(5)]).is_err());
        assert!(matches!(ColoringSpec::from_json("{\"r\": 2,\n \"assign\": [}"), Err(Error::Malformed(m)) if m.contains("line 2")));

        let rt: Coloring<IndexSet> = serde_json::from_str(&serde_json::to_string(&spec.on_subsets(2).unwrap()).unwrap()).unwrap();
        assert_eq!(rt, spec.on_subsets(2).unwrap());
    }
}
