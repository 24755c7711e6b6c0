//! Named scenario presets.
//!
//! All presets share the trial skeleton (n = 1000, 1:1 allocation, alpha =
//! 0.05, 10,000 replications) and the discontinuation law: probability 0.15
//! in months 0-6 (both arms) and 0.15 in months 6-12 (control arm only).
//! They differ on two axes:
//!
//! - scenario 1 vs 2: equal clinical-outcome probability (0.4/0.4) vs a
//!   clinically harmful short arm (0.5 vs 0.4);
//! - independence vs calibrated: `q612 = p_ya_control` makes the clinical
//!   outcome independent of late discontinuation, while `q612 = 1/3` couples
//!   them negatively, which pushes the control-arm composite rate up to the
//!   point where scenario 1 lands on a -10 pp risk difference and 50
//!   expected excess events.
//!
//! `no-defect` removes the late window entirely: with no arm-only category
//! both arms share one outcome definition and the true risk difference is 0.

use crate::model::{ArmDefinition, ExcessTiming, ScenarioConfig};

/// Default master seed baked into every preset.
pub const DEFAULT_SEED: u64 = 20240214;

/// Registry order: the four study presets, then the baseline.
pub const PRESET_NAMES: [&str; 5] = [
    "scenario1-independence",
    "scenario1-calibrated",
    "scenario2-independence",
    "scenario2-calibrated",
    "no-defect",
];

fn arms() -> [ArmDefinition; 2] {
    [
        ArmDefinition {
            id: "6m".into(),
            label: "6-month treatment duration".into(),
            treatment_duration: 6,
        },
        ArmDefinition {
            id: "12m".into(),
            label: "12-month treatment duration".into(),
            treatment_duration: 12,
        },
    ]
}

fn base(p_ya_treat: f64, p_disc_second: f64, q612: f64) -> ScenarioConfig {
    ScenarioConfig {
        n: 1000,
        arms: arms(),
        p_ya_control: 0.4,
        p_ya_treat,
        p_ya_excess_timing: ExcessTiming::AfterMonth6,
        p_disc_first: 0.15,
        p_disc_second,
        q612,
        alpha: 0.05,
        n_reps: 10_000,
        seed: DEFAULT_SEED,
    }
}

/// Look up a preset by name. Returns `None` for unknown names.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    match name {
        "scenario1-independence" => Some(base(0.4, 0.15, 0.4)),
        "scenario1-calibrated" => Some(base(0.4, 0.15, 1.0 / 3.0)),
        "scenario2-independence" => Some(base(0.5, 0.15, 0.4)),
        "scenario2-calibrated" => Some(base(0.5, 0.15, 1.0 / 3.0)),
        "no-defect" => Some(base(0.4, 0.0, 0.4)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_scenario;

    #[test]
    fn every_registered_preset_validates() {
        for name in PRESET_NAMES {
            let config = preset(name).expect(name);
            validate_scenario(config).expect(name);
        }
    }

    #[test]
    fn unknown_name_is_none() {
        assert!(preset("scenario3-calibrated").is_none());
    }

    #[test]
    fn preset_skeleton_matches_the_study_design() {
        let config = preset("scenario1-calibrated").unwrap();
        assert_eq!(config.n, 1000);
        assert_eq!(config.n_reps, 10_000);
        assert_eq!(config.alpha, 0.05);
        assert_eq!(config.arms[0].treatment_duration, 6);
        assert_eq!(config.arms[1].treatment_duration, 12);
    }

    #[test]
    fn independence_presets_tie_q612_to_the_marginal() {
        for name in ["scenario1-independence", "scenario2-independence"] {
            let config = preset(name).unwrap();
            assert_eq!(config.q612, config.p_ya_control);
        }
    }
}
