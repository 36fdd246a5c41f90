//! Parsing of command-line values into library types.

use std::fs;
use std::path::Path;

use ipstar::oracle::{OracleSet, SetSpec};
use ipstar::partition::ColoringSpec;
use ipstar::{Error, FiniteSeq, IndexSet, PosInt, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// `a..b` (inclusive), `a,b,c`, or a JSON list of integers or decimal strings.
pub fn sequence(text: &str) -> Result<FiniteSeq> {
    let text = text.trim();
    if !text.starts_with('[') && text.contains(',') {
        return FiniteSeq::new(text.split(',').map(posint).collect::<Result<_>>()?);
    }
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad range start {a:?}")))?;
        let b: u64 = b.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad range end {b:?}")))?;
        return FiniteSeq::range(a, b);
    }
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Term {
        Int(u64),
        Text(String),
    }
    let terms: Vec<Term> = json(text)?;
    let terms = terms
        .into_iter()
        .map(|t| match t {
            Term::Int(v) => PosInt::from_u64(v),
            Term::Text(s) => s.parse(),
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteSeq::new(terms)
}

/// JSON list of index sets, e.g. `[[1,5],[2,3]]`.
pub fn family(text: &str) -> Result<Vec<IndexSet>> {
    let raw: Vec<Vec<usize>> = json(text)?;
    raw.into_iter().map(IndexSet::new).collect()
}

pub fn posint(text: &str) -> Result<PosInt> {
    text.trim().parse()
}

/// Inline JSON when the argument starts with `{`, a file path otherwise.
fn inline_or_file(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(Path::new(arg)).map_err(|e| Error::InvalidArgument(format!("cannot read {arg}: {e}")))
}

pub fn oracle(arg: &str) -> Result<OracleSet> {
    OracleSet::from_json(&inline_or_file(arg)?)
}

pub fn set_spec(arg: &str) -> Result<SetSpec> {
    SetSpec::from_json(&inline_or_file(arg)?)
}

pub fn coloring(arg: &str) -> Result<ColoringSpec> {
    ColoringSpec::from_json(&inline_or_file(arg)?)
}

pub fn document<T: DeserializeOwned>(arg: &str) -> Result<T> {
    json(&inline_or_file(arg)?)
}

fn json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(format!("line {}, column {}: {e}", e.line(), e.column())))
}
