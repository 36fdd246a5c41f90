use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{BlockSeq, FiniteSeq, IndexSet};
use crate::oracle::{Membership, SetSpec};
use crate::pattern::sum_over;
use crate::posint::PosInt;
use crate::search::{
    conclude, ground_values, picks_to_blocks, search_blocks, BlockFilter, Halt, Meter, Pick, SearchBudget,
    SearchOutcome, SumFilter,
};

/// Sum subsystem of the ground sequence, the reservoir for step two.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage1 {
    pub blocks: BlockSeq,
    pub z: FiniteSeq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FsFpRoute {
    /// Products chosen inside a longer sum system.
    Guided,
    /// Sums and products searched together; stage one is the result itself.
    Direct,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FsFpStep {
    pub step: usize,
    pub value: PosInt,
    pub selection: IndexSet,
    /// `p · value` for every finite product `p` of the earlier values.
    pub products: Vec<PosInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FsFpCertificate {
    pub oracle: SetSpec,
    pub ground: FiniteSeq,
    pub route: FsFpRoute,
    pub stage1: Stage1,
    /// `K_n`: which stage-one blocks make up block `n`.
    pub selection: BlockSeq,
    /// `G_n = ∪_{s ∈ K_n} H_s`, over the ground sequence.
    pub blocks: BlockSeq,
    pub chosen: FiniteSeq,
    pub trace: Vec<FsFpStep>,
}

/// Finite products of `vals`, with repeats.
fn products_of(vals: &[u64]) -> Vec<BigUint> {
    let mut out: Vec<BigUint> = Vec::new();
    for &v in vals {
        let scaled: Vec<BigUint> = out.iter().map(|p| p * v).collect();
        out.extend(scaled);
        out.push(BigUint::from(v));
    }
    out
}

/// Admits `v` when `v ∈ A` and `p · v ∈ A` for each finite product `p` of
/// the values chosen so far.
struct ProductFilter<'a> {
    set: &'a dyn Membership,
    key: Vec<u64>,
    products: Vec<BigUint>,
}

impl<'a> ProductFilter<'a> {
    fn new(set: &'a dyn Membership) -> Self {
        ProductFilter { set, key: Vec::new(), products: Vec::new() }
    }
}

impl BlockFilter for ProductFilter<'_> {
    fn admits(&mut self, chosen: &[u64], v: u64) -> std::result::Result<bool, Halt> {
        if self.key != chosen {
            self.key = chosen.to_vec();
            self.products = products_of(chosen);
        }
        if !self.set.contains_u64(v)? {
            return Ok(false);
        }
        for p in &self.products {
            if !self.set.contains(&PosInt::new(p * v)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

struct Both<F, G>(F, G);

impl<F: BlockFilter, G: BlockFilter> BlockFilter for Both<F, G> {
    fn admits(&mut self, chosen: &[u64], v: u64) -> std::result::Result<bool, Halt> {
        Ok(self.0.admits(chosen, v)? && self.1.admits(chosen, v)?)
    }
}

/// Search `k` ordered blocks of `x` whose sums `y` have `FS(y) ∪ FP(y) ⊆ A`.
///
/// First a sum system of length `3k` inside `A` is extracted; then blocks of
/// that system are chosen so their products stay in `A` too. If that fails,
/// sums and products are searched together directly over `x`, so an
/// exhausted result means no such system exists within the value bound.
pub fn greedy_fs_fp(
    a: &SetSpec,
    x: &FiniteSeq,
    k: usize,
    budget: &SearchBudget,
) -> Result<SearchOutcome<FsFpCertificate>> {
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let ground = ground_values(x)?;
    let mut meter = Meter::new(budget);
    let mut diagnostic = String::new();
    let run = build_fs_fp(a, x, &ground, k, budget.value_cap(), &mut meter, &mut diagnostic);
    conclude(run, &meter, || diagnostic)
}

pub(crate) fn build_fs_fp(
    a: &SetSpec,
    x: &FiniteSeq,
    ground: &[u64],
    k: usize,
    cap: u64,
    meter: &mut Meter,
    diagnostic: &mut String,
) -> std::result::Result<Option<FsFpCertificate>, Halt> {
    let bounded = |g: &[u64]| cap.min(g.iter().sum());
    let outer_len = 3 * k;
    let outer = search_blocks(ground, outer_len, bounded(ground), &mut SumFilter::new(a), meter)?;
    let mut notes = vec![];
    match outer.picks {
        Some(picks) => {
            let z_vals: Vec<u64> = picks.iter().map(|p| p.value).collect();
            let inner = search_blocks(&z_vals, k, bounded(&z_vals), &mut ProductFilter::new(a), meter)?;
            match inner.picks {
                Some(sel) => return Ok(Some(assemble(a, x, FsFpRoute::Guided, &picks, &sel)?)),
                None => notes.push(format!("products inside the {outer_len}-term sum system stopped at step {}", inner.deepest + 1)),
            }
        }
        None => notes.push(format!("no {outer_len}-term sum system (deepest {})", outer.deepest)),
    }
    let mut filter = Both(SumFilter::new(a), ProductFilter::new(a));
    let direct = search_blocks(ground, k, bounded(ground), &mut filter, meter)?;
    match direct.picks {
        Some(picks) => {
            let identity: Vec<Pick> =
                (0..picks.len()).map(|i| Pick { value: picks[i].value, block: vec![i] }).collect();
            Ok(Some(assemble(a, x, FsFpRoute::Direct, &picks, &identity)?))
        }
        None => {
            notes.push(format!("direct search failed at step {}", direct.deepest + 1));
            *diagnostic = notes.join("; ");
            Ok(None)
        }
    }
}

fn assemble(a: &SetSpec, x: &FiniteSeq, route: FsFpRoute, outer: &[Pick], inner: &[Pick]) -> Result<FsFpCertificate> {
    let h = picks_to_blocks(outer)?;
    let z = sum_over(&h, x)?;
    let selection = picks_to_blocks(inner)?;
    let blocks = h.compose(&selection)?;
    let chosen = sum_over(&blocks, x)?;
    let vals = chosen.to_u64s().expect("bounded by the ground total");
    let mut trace = Vec::with_capacity(vals.len());
    for (n, (&v, sel)) in vals.iter().zip(selection.iter()).enumerate() {
        let mut products: Vec<PosInt> =
            products_of(&vals[..n]).into_iter().map(|p| PosInt::new(p * v)).collect::<Result<_>>()?;
        products.sort();
        products.dedup();
        trace.push(FsFpStep { step: n + 1, value: PosInt::from_u64(v)?, selection: sel.clone(), products });
    }
    Ok(FsFpCertificate {
        oracle: a.clone(),
        ground: x.clone(),
        route,
        stage1: Stage1 { blocks: h, z },
        selection,
        blocks,
        chosen,
        trace,
    })
}
