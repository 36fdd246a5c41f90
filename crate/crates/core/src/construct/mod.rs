//! Greedy constructions of sum-and-product systems and tower patterns, and
//! the verifier for every certificate the crate emits.

mod exp;
mod fsfp;
mod verify;

pub use exp::{exp_pattern, greedy_exp, CandidateSource, ExpCertificate, ExpOptions, ExpStage};
pub use fsfp::{greedy_fs_fp, FsFpCertificate, FsFpRoute, FsFpStep, Stage1};
pub use verify::{
    verify_certificate, verify_exp, verify_fs_fp, verify_fs_subsystem, verify_fu, verify_intersection,
    verify_refutation, verify_subsystem, verify_sum_free, verify_union_free, Certificate, Verdict,
};
