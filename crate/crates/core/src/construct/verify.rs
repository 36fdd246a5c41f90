//! Independent re-checking of certificates.
//!
//! Nothing here calls back into the searches that produced a certificate
//! except the union-free check, which needs an exhaustive run by nature.
//! Checks go in a fixed order and the verdict names the first that fails.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::exp::{exp_pattern, ExpCertificate};
use super::fsfp::{FsFpCertificate, FsFpRoute};
use crate::error::Result;
use crate::index::{BlockSeq, FiniteSeq, IndexSet};
use crate::oracle::{check_witness, IntersectionCertificate, Membership, SetSpec, StarReport, StarStatus};
use crate::partition::{Coloring, Color};
use crate::pattern::{fp, fs, fu, sum_over};
use crate::posint::PosInt;
use crate::search::{
    find_sum_triple, fu_search, FolkmanResult, FsSubsystemCertificate, FuCertificate, SearchBudget, SearchStatus,
    SubsystemCertificate, WeakSchurResult,
};

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    FsFp(FsFpCertificate),
    Exp(ExpCertificate),
    Subsystem(SubsystemCertificate),
    Intersection(IntersectionCertificate),
    FsSubsystem { coloring: Coloring<PosInt>, certificate: FsSubsystemCertificate },
    Fu { coloring: Coloring<IndexSet>, certificate: FuCertificate },
    Refutation { set: SetSpec, report: StarReport },
    SumFreeColoring(WeakSchurResult),
    UnionFreeColoring(FolkmanResult),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { check: String, detail: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    fn fail(check: &str, detail: impl Into<String>) -> Self {
        Verdict::Fail { check: check.into(), detail: detail.into() }
    }
}

/// Early return with the first failing verdict.
macro_rules! check {
    ($e:expr) => {
        match $e {
            Verdict::Pass => {}
            failed => return Ok(failed),
        }
    };
}

macro_rules! check_pure {
    ($e:expr) => {
        match $e {
            Verdict::Pass => {}
            failed => return failed,
        }
    };
}

pub fn verify_certificate(c: &Certificate) -> Result<Verdict> {
    match c {
        Certificate::FsFp(c) => verify_fs_fp(c),
        Certificate::Exp(c) => verify_exp(c),
        Certificate::Subsystem(c) => verify_subsystem(c),
        Certificate::Intersection(c) => verify_intersection(c),
        Certificate::FsSubsystem { coloring, certificate } => Ok(verify_fs_subsystem(coloring, certificate)),
        Certificate::Fu { coloring, certificate } => Ok(verify_fu(coloring, certificate)),
        Certificate::Refutation { set, report } => verify_refutation(set, report),
        Certificate::SumFreeColoring(r) => Ok(verify_sum_free(r)),
        Certificate::UnionFreeColoring(r) => verify_union_free(r),
    }
}

fn blocks_sum_to(check: &str, blocks: &BlockSeq, ground: &FiniteSeq, claimed: &FiniteSeq) -> Verdict {
    match sum_over(blocks, ground) {
        Err(e) => Verdict::fail(check, e.to_string()),
        Ok(y) if y != *claimed => {
            let n = y.iter().zip(claimed.iter()).position(|(a, b)| a != b).map_or(y.len().min(claimed.len()), |i| i);
            Verdict::fail(check, format!("block {} sums to {:?} but the certificate claims {:?}", n + 1, y.get(n + 1), claimed.get(n + 1)))
        }
        Ok(_) => Verdict::Pass,
    }
}

fn all_in(check: &str, what: &str, values: impl IntoIterator<Item = PosInt>, a: &dyn Membership) -> Result<Verdict> {
    for v in values {
        if !a.contains(&v)? {
            return Ok(Verdict::fail(check, format!("{what} {v} is not in the set")));
        }
    }
    Ok(Verdict::Pass)
}

pub fn verify_fs_fp(c: &FsFpCertificate) -> Result<Verdict> {
    check!(blocks_sum_to("stage1", &c.stage1.blocks, &c.ground, &c.stage1.z));
    match c.stage1.blocks.compose(&c.selection) {
        Err(e) => return Ok(Verdict::fail("selection", e.to_string())),
        Ok(g) if g != c.blocks => {
            return Ok(Verdict::fail("selection", "blocks are not the unions of the selected stage-one blocks"))
        }
        Ok(_) => {}
    }
    if c.route == FsFpRoute::Direct && c.selection != BlockSeq::identity(c.chosen.len())? {
        return Ok(Verdict::fail("selection", "a direct certificate selects every stage-one block in turn"));
    }
    check!(blocks_sum_to("blocks", &c.blocks, &c.ground, &c.chosen));
    check!(all_in("fs", "finite sum", fs(&c.chosen), &c.oracle)?);
    check!(all_in("fp", "finite product", fp(&c.chosen), &c.oracle)?);
    let z_sums = fs(&c.stage1.z);
    if let Some(s) = fs(&c.chosen).into_iter().find(|s| !z_sums.contains(s)) {
        return Ok(Verdict::fail("inheritance", format!("finite sum {s} is not a finite sum of stage one")));
    }
    check!(all_in("stage1_fs", "stage-one finite sum", z_sums, &c.oracle)?);
    if c.trace.len() != c.chosen.len() {
        return Ok(Verdict::fail("trace", "trace length differs from the chosen sequence"));
    }
    for (n, step) in c.trace.iter().enumerate() {
        let prefix_products = if n == 0 { BTreeSet::new() } else { fp(&FiniteSeq::new(c.chosen.terms()[..n].to_vec())?) };
        let expect: Vec<PosInt> = prefix_products.iter().map(|p| p * &step.value).collect::<BTreeSet<_>>().into_iter().collect();
        if step.step != n + 1
            || Some(&step.value) != c.chosen.get(n + 1)
            || Some(&step.selection) != c.selection.blocks().get(n)
            || step.products != expect
        {
            return Ok(Verdict::fail("trace", format!("step {} does not match the certificate", n + 1)));
        }
    }
    Ok(Verdict::Pass)
}

pub fn verify_exp(c: &ExpCertificate) -> Result<Verdict> {
    let terms = c.chosen.terms();
    if terms.windows(2).any(|w| w[0] >= w[1]) {
        return Ok(Verdict::fail("structure", "terms are not strictly increasing"));
    }
    if c.stages.len() != terms.len() || c.stages.iter().zip(terms).enumerate().any(|(j, (s, t))| s.index != j + 1 || &s.selected != t) {
        return Ok(Verdict::fail("structure", "stage records do not match the chosen terms"));
    }
    let pattern = exp_pattern(&c.chosen, c.digit_budget)?;
    if pattern.iter().ne(c.pattern.iter()) {
        return Ok(Verdict::fail("pattern", "listed pattern differs from the recomputed one"));
    }
    for t in &pattern {
        if !c.oracle.eval_tower(t)? {
            return Ok(Verdict::fail("pattern", format!("tower {t} is not in the set")));
        }
    }
    Ok(Verdict::Pass)
}

pub fn verify_subsystem(c: &SubsystemCertificate) -> Result<Verdict> {
    check!(blocks_sum_to("blocks", &c.blocks, &c.ground, &c.chosen));
    all_in("fs", "finite sum", fs(&c.chosen), &c.oracle)
}

pub fn verify_intersection(c: &IntersectionCertificate) -> Result<Verdict> {
    if c.outer.ground != c.ground || c.inner.ground != c.outer.chosen {
        return Ok(Verdict::fail("structure", "stages are not chained"));
    }
    check!(verify_subsystem(&c.outer)?);
    check!(verify_subsystem(&c.inner)?);
    match c.outer.blocks.compose(&c.inner.blocks) {
        Ok(g) if g == c.blocks => {}
        _ => return Ok(Verdict::fail("structure", "blocks are not the composition of the two stages")),
    }
    check!(blocks_sum_to("blocks", &c.blocks, &c.ground, &c.chosen));
    let sums = fs(&c.chosen);
    check!(all_in("fs_a", "finite sum", sums.iter().cloned(), &c.a)?);
    all_in("fs_b", "finite sum", sums, &c.b)
}

pub fn verify_fs_subsystem(coloring: &Coloring<PosInt>, c: &FsSubsystemCertificate) -> Verdict {
    check_pure!(blocks_sum_to("blocks", &c.blocks, &c.z, &c.chosen));
    for s in fs(&c.chosen) {
        match coloring.color(&s) {
            Some(col) if col == c.color => {}
            Some(col) => return Verdict::fail("color", format!("finite sum {s} has color {col}, not {}", c.color)),
            None => return Verdict::fail("color", format!("finite sum {s} is not colored")),
        }
    }
    Verdict::Pass
}

pub fn verify_fu(coloring: &Coloring<IndexSet>, c: &FuCertificate) -> Verdict {
    for (i, s) in c.sets.iter().enumerate() {
        if s.max_elem() > c.m {
            return Verdict::fail("structure", format!("set {s} leaves [1..{}]", c.m));
        }
        if let Some(t) = c.sets[..i].iter().find(|t| !t.is_disjoint(s)) {
            return Verdict::fail("structure", format!("sets {t} and {s} overlap"));
        }
        if c.ordered && i > 0 && c.sets[i - 1].max_elem() >= s.min_elem() {
            return Verdict::fail("structure", format!("set {s} does not start after {}", c.sets[i - 1]));
        }
    }
    let Ok(unions) = fu(&c.sets) else {
        return Verdict::fail("structure", "no sets");
    };
    for u in unions {
        match coloring.color(&u) {
            Some(col) if col == c.color => {}
            Some(col) => return Verdict::fail("color", format!("union {u} has color {col}, not {}", c.color)),
            None => return Verdict::fail("color", format!("union {u} is not colored")),
        }
    }
    Verdict::Pass
}

pub fn verify_refutation(set: &SetSpec, r: &StarReport) -> Result<Verdict> {
    match (&r.status, &r.witness) {
        (StarStatus::Refuted, Some(w)) => {
            if w.len() != r.k {
                return Ok(Verdict::fail("witness", format!("witness has {} terms, not {}", w.len(), r.k)));
            }
            Ok(match check_witness(r.kind, set, r.n_bound, w)? {
                None => Verdict::Pass,
                Some(why) => Verdict::fail("witness", why),
            })
        }
        (StarStatus::Refuted, None) => Ok(Verdict::fail("witness", "refuted without a witness")),
        _ => Ok(Verdict::fail("witness", "only refutations carry a checkable witness")),
    }
}

pub fn verify_sum_free(r: &WeakSchurResult) -> Verdict {
    if r.avoiding.len() as u64 + 1 != r.number {
        return Verdict::fail("structure", "avoiding coloring does not cover [1..number-1]");
    }
    if let Some(c) = r.avoiding.iter().find(|&&c| c == 0 || c > r.r) {
        return Verdict::fail("structure", format!("color {c} outside 1..={}", r.r));
    }
    match find_sum_triple(&r.avoiding) {
        Some((x, y)) => Verdict::fail("color", format!("{x} + {y} = {} is monochromatic", x + y)),
        None => Verdict::Pass,
    }
}

pub fn verify_union_free(r: &FolkmanResult) -> Result<Verdict> {
    let m = r.number - 1;
    let Some(c) = &r.avoiding else {
        return Ok(if m == 0 { Verdict::Pass } else { Verdict::fail("structure", "missing avoiding coloring") });
    };
    if c.iter().any(|(_, col): (&IndexSet, Color)| col > r.r) {
        return Ok(Verdict::fail("structure", "coloring uses too many colors"));
    }
    let out = fu_search(c, m, r.k, false, &SearchBudget::default())?;
    Ok(match out.status() {
        SearchStatus::Exhausted => Verdict::Pass,
        SearchStatus::Found => Verdict::fail(
            "color",
            format!("monochromatic union family {:?}", out.certificate().expect("found").sets),
        ),
        SearchStatus::BudgetExceeded => Verdict::fail("budget", "union search did not finish"),
    })
}
