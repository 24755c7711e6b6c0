//! The shipped estimand fixtures, run end to end through parsing, validation
//! and the checker. Four designs with an arm-only category must come back
//! non-causal with the right offender; the rescue-medication design, whose
//! single category applies everywhere, must pass.

use std::fs;
use std::path::PathBuf;

use estimand_core::checker::{check_estimand, VerdictStatus};
use estimand_core::config::parse_estimand_json;

fn fixture(name: &str) -> estimand_core::EstimandSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_estimand_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn treatment_duration_window_is_non_causal() {
    let verdict = check_estimand(&fixture("table1-row1.json"));
    assert_eq!(verdict.status, VerdictStatus::NonCausal);
    assert_eq!(verdict.offending.len(), 1);
    let offender = &verdict.offending[0];
    assert_eq!(offender.category, "disc-6-12");
    assert_eq!(offender.missing_arms, vec!["6m".to_string()]);

    let long = &verdict.rendered_definitions["12m"];
    let short = &verdict.rendered_definitions["6m"];
    assert!(long.contains("stopping treatment before 12 months"));
    assert!(short.contains("stopping treatment before 6 months"));
    assert!(!short.contains("stopping treatment before 12 months"));
}

#[test]
fn one_sided_switching_is_non_causal() {
    let verdict = check_estimand(&fixture("table1-row2.json"));
    assert_eq!(verdict.status, VerdictStatus::NonCausal);
    assert_eq!(verdict.offending.len(), 1);
    assert_eq!(verdict.offending[0].category, "switch-on-progression");
    assert_eq!(
        verdict.offending[0].missing_arms,
        vec!["experimental".to_string()]
    );
    // The arm without the category keeps the bare endpoint.
    assert_eq!(
        verdict.rendered_definitions["experimental"],
        "not alive at 5 years"
    );
}

#[test]
fn threshold_band_category_is_non_causal() {
    let verdict = check_estimand(&fixture("table1-row3.json"));
    assert_eq!(verdict.status, VerdictStatus::NonCausal);
    assert_eq!(verdict.offending.len(), 1);
    assert_eq!(verdict.offending[0].category, "transfusion-8-10");
    assert_eq!(
        verdict.offending[0].missing_arms,
        vec!["liberal".to_string()]
    );
}

#[test]
fn component_only_one_arm_takes_is_non_causal() {
    let verdict = check_estimand(&fixture("table1-row4.json"));
    assert_eq!(verdict.status, VerdictStatus::NonCausal);
    assert_eq!(verdict.offending.len(), 1);
    assert_eq!(verdict.offending[0].category, "stop-cbt");
    assert_eq!(
        verdict.offending[0].missing_arms,
        vec!["med-only".to_string()]
    );
}

#[test]
fn shared_rescue_medication_is_causal() {
    let verdict = check_estimand(&fixture("rescue-medication.json"));
    assert_eq!(verdict.status, VerdictStatus::Causal);
    assert!(verdict.offending.is_empty());
    // Identical categories render identical definitions up to the arm id.
    let a = &verdict.rendered_definitions["drug-a"];
    let b = &verdict.rendered_definitions["drug-b"];
    assert_eq!(a, b);
}

#[test]
fn scenario_fixture_matches_the_preset() {
    let path =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/scenario1-calibrated.json");
    let text = fs::read_to_string(path).unwrap();
    let parsed = estimand_core::config::parse_scenario_json(&text).unwrap();
    assert_eq!(
        parsed,
        estimand_core::presets::preset("scenario1-calibrated").unwrap()
    );
}
