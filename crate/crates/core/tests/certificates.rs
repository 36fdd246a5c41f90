//! Certificates built by hand or tampered with, checked by the verifier.

use ipstar::construct::{
    exp_pattern, greedy_fs_fp, verify_certificate, verify_exp, CandidateSource, Certificate, ExpCertificate, ExpStage, Verdict,
};
use ipstar::oracle::{aip_refute, mip_refute, OracleSet, SetSpec};
use ipstar::search::{extract_in_star, SearchBudget, SearchStatus};
use ipstar::{DigitBudget, FiniteSeq, PosInt};

fn seq(v: &[u64]) -> FiniteSeq {
    FiniteSeq::from_u64s(v).unwrap()
}

fn mod5_01() -> OracleSet {
    OracleSet::or(vec![OracleSet::mod_eq(5, 0).unwrap(), OracleSet::mod_eq(5, 1).unwrap()]).unwrap()
}

fn exp_certificate(oracle: OracleSet, terms: &[u64]) -> ExpCertificate {
    let chosen = seq(terms);
    let digits = DigitBudget::default();
    ExpCertificate {
        oracle,
        digit_budget: digits,
        stages: terms
            .iter()
            .enumerate()
            .map(|(i, &t)| ExpStage {
                index: i + 1,
                bases: Vec::new(),
                structure: None,
                source: CandidateSource::Scan,
                selected: PosInt::lit(t),
            })
            .collect(),
        pattern: exp_pattern(&chosen, digits).unwrap().into_iter().collect(),
        chosen,
    }
}

#[test]
fn five_and_ten_pass_for_residues_zero_and_one() {
    assert_eq!(verify_exp(&exp_certificate(mod5_01(), &[5, 10])).unwrap(), Verdict::Pass);
    assert_eq!(verify_exp(&exp_certificate(mod5_01(), &[5, 6])).unwrap(), Verdict::Pass);
}

#[test]
fn five_and_ten_fail_for_odds_at_ten() {
    let verdict = verify_exp(&exp_certificate(OracleSet::mod_eq(2, 1).unwrap(), &[5, 10])).unwrap();
    match verdict {
        Verdict::Fail { check, detail } => {
            assert_eq!(check, "pattern");
            assert!(detail.contains("tower 10 "), "{detail}");
        }
        Verdict::Pass => panic!("10 is even"),
    }
}

#[test]
fn stale_pattern_is_rejected() {
    let mut cert = exp_certificate(mod5_01(), &[5, 10]);
    cert.pattern.pop();
    assert!(matches!(verify_exp(&cert).unwrap(), Verdict::Fail { check, .. } if check == "pattern"));
    let mut cert = exp_certificate(mod5_01(), &[5, 10]);
    cert.stages[1].selected = PosInt::lit(11);
    assert!(matches!(verify_exp(&cert).unwrap(), Verdict::Fail { check, .. } if check == "structure"));
}

#[test]
fn fs_fp_certificate_survives_json_and_catches_edits() {
    let a = SetSpec::Predicate(OracleSet::multiples_of(4).unwrap());
    let out = greedy_fs_fp(&a, &FiniteSeq::range(1, 64).unwrap(), 2, &SearchBudget::default()).unwrap();
    let cert = Certificate::FsFp(out.into_certificate().unwrap());
    let text = serde_json::to_string(&cert).unwrap();
    let back: Certificate = serde_json::from_str(&text).unwrap();
    assert_eq!(verify_certificate(&back).unwrap(), Verdict::Pass);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);

    // claim a different sequence than the blocks produce
    let lied = text.replacen(r#""chosen":["4","8"]"#, r#""chosen":["4","12"]"#, 1);
    assert_ne!(lied, text);
    let lied: Certificate = serde_json::from_str(&lied).unwrap();
    assert!(!verify_certificate(&lied).unwrap().is_pass());

    // an unknown field is malformed, not silently dropped
    let extra = text.replacen(r#""kind":"fs_fp","#, r#""kind":"fs_fp","note":1,"#, 1);
    assert!(serde_json::from_str::<Certificate>(&extra).is_err());
}

#[test]
fn refutation_certificates_verify() {
    let odds = OracleSet::mod_eq(2, 1).unwrap();
    let set = SetSpec::Predicate(odds.clone());
    let report = aip_refute(&odds, 20, 2, &SearchBudget::default()).unwrap();
    assert_eq!(report.witness, Some(seq(&[2, 4])));
    let cert = Certificate::Refutation { set: set.clone(), report: report.clone() };
    assert!(verify_certificate(&cert).unwrap().is_pass());

    let mut forged = report;
    forged.witness = Some(seq(&[2, 3]));
    assert!(!verify_certificate(&Certificate::Refutation { set, report: forged }).unwrap().is_pass());

    let fives = OracleSet::multiples_of(5).unwrap();
    let report = mip_refute(&fives, 10, 2, &SearchBudget::default()).unwrap();
    assert_eq!(report.witness, Some(seq(&[2, 3])));
}

#[test]
fn extraction_certificate_round_trips() {
    let a = SetSpec::Predicate(OracleSet::multiples_of(3).unwrap());
    let out = extract_in_star(&a, &FiniteSeq::range(1, 30).unwrap(), 3, &SearchBudget::default()).unwrap();
    assert_eq!(out.status(), SearchStatus::Found);
    let cert = Certificate::Subsystem(out.into_certificate().unwrap());
    let back: Certificate = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
    assert!(verify_certificate(&back).unwrap().is_pass());
}
