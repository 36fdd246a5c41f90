//! Finite-scale constructions of sum and product patterns inside IP* sets.
//!
//! The crate is organised in layers:
//!
//! * [`posint`] and [`tower`] hold the arithmetic. [`index`] and [`pattern`]
//!   build index sets and the FS / FP / FU / EXP generators on top of it.
//! * [`partition`] holds colorings and the ways of moving them between
//!   integers and index sets.
//! * [`search`] holds the backtracking searches and the exhaustive oracles
//!   used as ground truth.
//! * [`oracle`] holds the predicate language for candidate sets and the
//!   scale-bounded star-set refuters.
//! * [`construct`] holds the two greedy constructions and the certificate
//!   verifier.
//!
//! Every construction returns a certificate that [`construct::verify_certificate`]
//! re-checks from scratch.

pub mod construct;
pub mod error;
pub mod index;
pub mod modular;
pub mod oracle;
pub mod partition;
pub mod pattern;
pub mod posint;
pub mod search;
pub mod tower;

pub use error::{Error, Result};
pub use index::{BlockSeq, FiniteSeq, IndexSet};
pub use posint::PosInt;
pub use tower::{DigitBudget, TowerInt};

/// Size the global worker pool used by parallel evaluation. Only the first
/// call has an effect.
pub fn set_threads(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::invalid(format!("cannot size the worker pool: {e}")))
}
