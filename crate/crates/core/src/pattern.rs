//! Pattern generators. Each one enumerates a finite pattern exactly, with
//! duplicates collapsed.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index::{BlockSeq, FiniteSeq, IndexSet};
use crate::oracle::OracleSet;
use crate::posint::PosInt;
use crate::tower::{DigitBudget, TowerInt};

/// All sums over nonempty index subsets, duplicates collapsed.
pub fn fs(x: &FiniteSeq) -> BTreeSet<PosInt> {
    let mut out: BTreeSet<PosInt> = BTreeSet::new();
    for t in x.iter() {
        let shifted: Vec<PosInt> = out.iter().map(|s| s + t).collect();
        out.extend(shifted);
        out.insert(t.clone());
    }
    out
}

/// All products over nonempty index subsets, duplicates collapsed.
pub fn fp(x: &FiniteSeq) -> BTreeSet<PosInt> {
    let mut out: BTreeSet<PosInt> = BTreeSet::new();
    for t in x.iter() {
        let scaled: Vec<PosInt> = out.iter().map(|s| s * t).collect();
        out.extend(scaled);
        out.insert(t.clone());
    }
    out
}

/// All unions over nonempty subfamilies.
pub fn fu(family: &[IndexSet]) -> Result<BTreeSet<IndexSet>> {
    if family.is_empty() {
        return Err(Error::invalid("family must be nonempty"));
    }
    let mut out: BTreeSet<IndexSet> = BTreeSet::new();
    for k in family {
        let joined: Vec<IndexSet> = out.iter().map(|u| u.union(k)).collect();
        out.extend(joined);
        out.insert(k.clone());
    }
    Ok(out)
}

/// Towers `x_{i_k}^(x_{i_{k-1}}^(…^x_{i_1}))` over nondecreasing index
/// tuples `i_1 <= … <= i_k` with `k <= kmax`.
pub fn exp1(x: &FiniteSeq, kmax: usize, budget: DigitBudget) -> Result<BTreeSet<TowerInt>> {
    if kmax == 0 {
        return Err(Error::invalid("kmax must be >= 1"));
    }
    let bases: Vec<TowerInt> = x.iter().cloned().map(TowerInt::Exact).collect();
    // ending[j]: towers whose outermost base is x_{j+1}, for the current length
    let mut ending: Vec<BTreeSet<TowerInt>> = bases.iter().map(|b| BTreeSet::from([b.clone()])).collect();
    let mut out: BTreeSet<TowerInt> = ending.iter().flatten().cloned().collect();
    for _ in 2..=kmax {
        let mut below: BTreeSet<TowerInt> = BTreeSet::new();
        let mut next = Vec::with_capacity(bases.len());
        for (j, base) in bases.iter().enumerate() {
            below.extend(ending[j].iter().cloned());
            let level: BTreeSet<TowerInt> = below.iter().map(|e| TowerInt::pow(base, e, budget)).collect();
            next.push(level);
        }
        ending = next;
        out.extend(ending.iter().flatten().cloned());
    }
    Ok(out)
}

/// Values `x_{i_1}^(x_{i_2}⋯x_{i_k})` over nondecreasing index tuples with
/// `k <= kmax`.
pub fn exp2(x: &FiniteSeq, kmax: usize, budget: DigitBudget) -> Result<BTreeSet<TowerInt>> {
    if kmax == 0 {
        return Err(Error::invalid("kmax must be >= 1"));
    }
    let n = x.len();
    let vals: Vec<&BigUint> = x.iter().map(PosInt::value).collect();
    // from[i]: products of nondecreasing tuples of the current length with
    // every index >= i (0-based); length 0 gives the empty product
    let mut from: Vec<BTreeSet<BigUint>> = vec![BTreeSet::from([BigUint::one()]); n + 1];
    from[n].clear();
    let mut exponents: Vec<BTreeSet<BigUint>> = vec![BTreeSet::from([BigUint::one()]); n];
    for _ in 2..=kmax {
        let mut next: Vec<BTreeSet<BigUint>> = vec![BTreeSet::new(); n + 1];
        for i in (0..n).rev() {
            let mut here = next[i + 1].clone();
            here.extend(from[i].iter().map(|p| p * vals[i]));
            next[i] = here;
        }
        from = next;
        for (i, e) in exponents.iter_mut().enumerate() {
            e.extend(from[i].iter().cloned());
        }
    }
    let mut out = BTreeSet::new();
    for (i, exps) in exponents.iter().enumerate() {
        let base = TowerInt::Exact(x.terms()[i].clone());
        for e in exps {
            let e = TowerInt::Exact(PosInt::new(e.clone()).expect("nonempty product"));
            out.insert(TowerInt::pow(&base, &e, budget));
        }
    }
    Ok(out)
}

/// `{ m in 1..=bound : n^m ∈ A }`.
pub fn log_filter(a: &OracleSet, n: &PosInt, bound: u64, budget: DigitBudget) -> Result<BTreeSet<u64>> {
    if n.is_one() {
        return Err(Error::invalid("log base must be >= 2"));
    }
    if bound == 0 {
        return Err(Error::invalid("bound must be >= 1"));
    }
    let base = TowerInt::Exact(n.clone());
    let hits: Vec<Option<u64>> = (1..=bound)
        .into_par_iter()
        .map(|m| {
            let t = TowerInt::pow(&base, &TowerInt::lit(m), budget);
            Ok(a.eval_tower(&t)?.then_some(m))
        })
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}

/// `y_n = Σ_{t ∈ H_n} x_t`.
pub fn sum_over(blocks: &BlockSeq, x: &FiniteSeq) -> Result<FiniteSeq> {
    let mut out = Vec::with_capacity(blocks.len());
    for h in blocks.iter() {
        if h.max_elem() > x.len() {
            return Err(Error::invalid(format!(
                "block {h} reaches index {} beyond sequence length {}",
                h.max_elem(),
                x.len()
            )));
        }
        let s = h.iter().map(|t| x.terms()[t - 1].value()).sum::<BigUint>();
        out.push(PosInt::new(s).expect("sum of positive terms"));
    }
    FiniteSeq::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[u64]) -> FiniteSeq {
        FiniteSeq::from_u64s(v).unwrap()
    }

    fn set(v: &[u64]) -> BTreeSet<PosInt> {
        v.iter().map(|&t| PosInt::lit(t)).collect()
    }

    fn towers(v: &[u64]) -> BTreeSet<TowerInt> {
        v.iter().map(|&t| TowerInt::lit(t)).collect()
    }

    fn iset(v: &[usize]) -> IndexSet {
        IndexSet::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn fs_examples() {
        assert_eq!(fs(&seq(&[1, 2, 4])), set(&[1, 2, 3, 4, 5, 6, 7]));
        assert_eq!(fs(&seq(&[5])), set(&[5]));
        assert_eq!(fs(&seq(&[2, 2])), set(&[2, 4]));
    }

    #[test]
    fn fp_examples() {
        assert_eq!(fp(&seq(&[2, 3])), set(&[2, 3, 6]));
        assert_eq!(fp(&seq(&[1, 1])), set(&[1]));
        assert_eq!(fp(&seq(&[2, 3, 5])), set(&[2, 3, 5, 6, 10, 15, 30]));
    }

    #[test]
    fn fu_examples() {
        let out = fu(&[iset(&[1]), iset(&[2])]).unwrap();
        assert_eq!(out, BTreeSet::from([iset(&[1]), iset(&[2]), iset(&[1, 2])]));
        let out = fu(&[iset(&[1, 2])]).unwrap();
        assert_eq!(out, BTreeSet::from([iset(&[1, 2])]));
        assert_eq!(fu(&[iset(&[1]), iset(&[2]), iset(&[4])]).unwrap().len(), 7);
        assert!(fu(&[]).is_err());
    }

    #[test]
    fn exp1_examples() {
        let b = DigitBudget::default();
        assert_eq!(exp1(&seq(&[2, 3]), 2, b).unwrap(), towers(&[2, 3, 4, 9, 27]));
        assert_eq!(exp1(&seq(&[2]), 1, b).unwrap(), towers(&[2]));
        let k3 = exp1(&seq(&[2, 3]), 3, b).unwrap();
        let three_27 = TowerInt::Exact(PosInt::lit(3).pow(27));
        assert!(k3.contains(&three_27));
        assert!(exp1(&seq(&[2]), 0, b).is_err());
    }

    #[test]
    fn exp2_examples() {
        let b = DigitBudget::default();
        assert_eq!(exp2(&seq(&[2, 3]), 2, b).unwrap(), towers(&[2, 3, 4, 8, 27]));
        assert_eq!(exp2(&seq(&[2]), 2, b).unwrap(), towers(&[2, 4]));
        assert!(exp2(&seq(&[1, 5]), 3, b).unwrap().contains(&TowerInt::lit(1)));
    }

    #[test]
    fn log_filter_examples() {
        let b = DigitBudget::default();
        let a = OracleSet::mod_eq(7, 1).unwrap();
        let got = log_filter(&a, &PosInt::lit(2), 12, b).unwrap();
        assert_eq!(got, BTreeSet::from([3, 6, 9, 12]));
        let a = OracleSet::mod_eq(5, 0).unwrap();
        assert_eq!(log_filter(&a, &PosInt::lit(5), 4, b).unwrap(), BTreeSet::from([1, 2, 3, 4]));
        let none = OracleSet::nothing();
        assert!(log_filter(&none, &PosInt::lit(3), 10, b).unwrap().is_empty());
        assert!(log_filter(&a, &PosInt::lit(1), 4, b).is_err());
    }

    #[test]
    fn sum_over_examples() {
        let blocks = BlockSeq::new(vec![iset(&[1, 2]), iset(&[4])]).unwrap();
        assert_eq!(sum_over(&blocks, &seq(&[1, 2, 3, 4])).unwrap(), seq(&[3, 4]));
        let blocks = BlockSeq::new(vec![iset(&[3])]).unwrap();
        assert_eq!(sum_over(&blocks, &seq(&[10, 20, 30])).unwrap(), seq(&[30]));
        let blocks = BlockSeq::identity(3).unwrap();
        assert_eq!(sum_over(&blocks, &seq(&[1, 2, 4])).unwrap(), seq(&[1, 2, 4]));
        let blocks = BlockSeq::new(vec![iset(&[5])]).unwrap();
        assert!(matches!(sum_over(&blocks, &seq(&[1, 2])), Err(Error::InvalidArgument(_))));
    }
}
