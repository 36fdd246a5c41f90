//! Budgeted exhaustive searches.
//!
//! Every search walks its candidates in a fixed canonical order, so a found
//! certificate is the first one in that order and an exhausted run really
//! covered the whole space. Searches stop early when the node count or the
//! wall clock passes the [`SearchBudget`].

mod blocks;
mod extract;
mod fu;
mod numbers;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::posint::{decimal_u64, PosInt};

pub(crate) use blocks::{search_blocks, BlockFilter, Pick};
pub use extract::{extract_in_star, SubsystemCertificate};
pub(crate) use extract::{ground_values, picks_to_blocks, SumFilter};
pub use fu::{brute_oracle_fs, fs_subsystem_search, fu_search, FsSubsystemCertificate, FuCertificate};
pub use numbers::{
    find_sum_triple, folkman_union_number, weak_schur_number, FolkmanResult, WeakSchurResult,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBudget {
    #[serde(with = "decimal_u64")]
    pub max_nodes: u64,
    #[serde(with = "decimal_u64")]
    pub max_millis: u64,
    pub max_value: PosInt,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 50_000_000, max_millis: 120_000, max_value: PosInt::lit(1_000_000_000_000) }
    }
}

impl SearchBudget {
    pub fn with_nodes(mut self, n: u64) -> Self {
        self.max_nodes = n;
        self
    }

    pub fn with_millis(mut self, ms: u64) -> Self {
        self.max_millis = ms;
        self
    }

    pub fn with_max_value(mut self, v: PosInt) -> Self {
        self.max_value = v;
        self
    }

    pub(crate) fn value_cap(&self) -> u64 {
        self.max_value.to_u64().unwrap_or(u64::MAX)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    Exhausted,
    BudgetExceeded,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub millis: u64,
}

/// Why a search stopped before finishing.
#[derive(Debug)]
pub(crate) enum Halt {
    Budget,
    Error(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Error(e)
    }
}

pub(crate) struct Meter {
    nodes: u64,
    max_nodes: u64,
    started: Instant,
    deadline: Instant,
}

impl Meter {
    pub(crate) fn new(budget: &SearchBudget) -> Self {
        let started = Instant::now();
        let deadline = started.checked_add(Duration::from_millis(budget.max_millis)).unwrap_or(started + Duration::from_secs(86_400 * 365));
        Meter { nodes: 0, max_nodes: budget.max_nodes, started, deadline }
    }

    pub(crate) fn tick(&mut self) -> Result<(), Halt> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Halt::Budget);
        }
        if self.nodes.is_multiple_of(1024) && Instant::now() > self.deadline {
            return Err(Halt::Budget);
        }
        Ok(())
    }

    pub(crate) fn stats(&self) -> SearchStats {
        SearchStats { nodes: self.nodes, millis: self.started.elapsed().as_millis() as u64 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome<C> {
    status: SearchStatus,
    certificate: Option<C>,
    stats: SearchStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    diagnostic: Option<String>,
}

impl<C> SearchOutcome<C> {
    pub fn found(certificate: C, stats: SearchStats) -> Self {
        SearchOutcome { status: SearchStatus::Found, certificate: Some(certificate), stats, diagnostic: None }
    }

    pub fn exhausted(stats: SearchStats, diagnostic: impl Into<String>) -> Self {
        SearchOutcome { status: SearchStatus::Exhausted, certificate: None, stats, diagnostic: Some(diagnostic.into()) }
    }

    pub fn budget_exceeded(stats: SearchStats, diagnostic: impl Into<String>) -> Self {
        SearchOutcome {
            status: SearchStatus::BudgetExceeded,
            certificate: None,
            stats,
            diagnostic: Some(diagnostic.into()),
        }
    }

    pub fn status(&self) -> SearchStatus {
        self.status
    }

    pub fn is_found(&self) -> bool {
        self.status == SearchStatus::Found
    }

    pub fn certificate(&self) -> Option<&C> {
        self.certificate.as_ref()
    }

    pub fn into_certificate(self) -> Option<C> {
        self.certificate
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn diagnostic(&self) -> Option<&str> {
        self.diagnostic.as_deref()
    }

    pub fn map<D>(self, f: impl FnOnce(C) -> D) -> SearchOutcome<D> {
        SearchOutcome {
            status: self.status,
            certificate: self.certificate.map(f),
            stats: self.stats,
            diagnostic: self.diagnostic,
        }
    }
}

/// Turn a finished or halted run into an outcome; hard errors pass through.
pub(crate) fn conclude<C>(
    run: Result<Option<C>, Halt>,
    meter: &Meter,
    exhausted: impl FnOnce() -> String,
) -> crate::Result<SearchOutcome<C>> {
    match run {
        Ok(Some(c)) => Ok(SearchOutcome::found(c, meter.stats())),
        Ok(None) => Ok(SearchOutcome::exhausted(meter.stats(), exhausted())),
        Err(Halt::Budget) => Ok(SearchOutcome::budget_exceeded(
            meter.stats(),
            format!("budget exhausted after {} nodes", meter.stats().nodes),
        )),
        Err(Halt::Error(e)) => Err(e),
    }
}
