//! Domain types shared by every module: treatment arms, intercurrent-event
//! categories, estimand definitions, and the scenario configuration that
//! drives the simulation engine.
//!
//! All types are plain data and immutable after validation, so they can be
//! shared freely across replication workers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A treatment arm in a trial design.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmDefinition {
    /// Short identifier, e.g. `"6m"`. Non-empty and unique within a spec.
    pub id: String,
    /// Human-readable name, e.g. `"6-month treatment duration"`.
    pub label: String,
    /// Assigned treatment duration in months. Must be positive.
    pub treatment_duration: u32,
}

/// Half-open month interval `[start, end)` in which a category can occur.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonthWindow {
    pub start_month: f64,
    pub end_month: f64,
}

/// One way an intercurrent event can present, together with the arms in
/// which it can occur at all. A category whose `applicable_arms` is a proper
/// subset of the trial's arms is what makes a composite strategy non-causal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntercurrentEventCategory {
    pub id: String,
    /// Free-text description; used verbatim when rendering the per-arm
    /// outcome definitions.
    pub description: String,
    /// Arm ids this category can occur in (set semantics; order irrelevant).
    pub applicable_arms: Vec<String>,
    /// Optional timing window for the category.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<MonthWindow>,
}

impl IntercurrentEventCategory {
    /// Whether the category can occur in the given arm.
    pub fn applies_to(&self, arm_id: &str) -> bool {
        self.applicable_arms.iter().any(|a| a == arm_id)
    }
}

/// Strategy used to handle an intercurrent event in the estimand definition.
///
/// The checker's verdict logic is defined for `Composite` and
/// `WhileOnTreatment`; any `Other` strategy passes through as unassessed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    /// Event occurrence is folded into the endpoint (event => unfavourable).
    Composite,
    /// The outcome's timeframe is truncated at the event.
    WhileOnTreatment,
    /// Any other strategy (hypothetical, principal stratum, ...), named.
    Other(String),
}

impl StrategyKind {
    /// Strategies whose outcome definition absorbs the event, and which the
    /// checker therefore assesses.
    pub fn is_assessable(&self) -> bool {
        matches!(
            self,
            StrategyKind::Composite | StrategyKind::WhileOnTreatment
        )
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StrategyKind::Composite => write!(f, "composite"),
            StrategyKind::WhileOnTreatment => write!(f, "while-on-treatment"),
            StrategyKind::Other(name) => write!(f, "other ({name})"),
        }
    }
}

/// An intercurrent event with its declared categories and handling strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimandEvent {
    pub name: String,
    pub strategy: StrategyKind,
    pub categories: Vec<IntercurrentEventCategory>,
}

/// Declarative estimand definition consumed by the checker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimandSpec {
    /// At least two arms.
    pub arms: Vec<ArmDefinition>,
    /// Endpoint description, phrased as the unfavourable outcome,
    /// e.g. `"not free from tuberculosis at 12 months"`.
    pub endpoint: String,
    pub events: Vec<EstimandEvent>,
}

/// Timing of the treated arm's excess adverse clinical outcomes.
///
/// The only supported timing places the excess after month 6 - after the
/// short arm's treatment has ended - so it cannot interact with the shared
/// early-discontinuation window. Recorded for documentation; it does not
/// change the composite computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcessTiming {
    AfterMonth6,
}

/// Full parameterization of the two-arm trial data-generating mechanism.
///
/// Arm roles are positional: `arms[0]` is the short-duration (treated, Z=1)
/// arm, `arms[1]` the long-duration (control, Z=0) arm. Only the control arm
/// has the late discontinuation window (months 6-12), which is the
/// arm-asymmetry the simulation demonstrates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Total participants; even, so a 1:1 split is exact.
    pub n: u64,
    /// `[treated (short duration), control (long duration)]`.
    pub arms: [ArmDefinition; 2],
    /// P(adverse clinical outcome) in the control arm.
    pub p_ya_control: f64,
    /// P(adverse clinical outcome) in the treated arm.
    pub p_ya_treat: f64,
    pub p_ya_excess_timing: ExcessTiming,
    /// P(discontinuation in months 0-6) - shared by both arms.
    pub p_disc_first: f64,
    /// P(discontinuation in months 6-12) - reachable in the control arm only.
    pub p_disc_second: f64,
    /// P(Y_a = 1 | discontinuation in months 6-12) in the control arm.
    /// Setting `q612 = p_ya_control` makes the components independent.
    pub q612: f64,
    /// Two-sided significance level.
    pub alpha: f64,
    /// Monte Carlo replications per run.
    pub n_reps: u64,
    /// Master seed; every replication derives its own substream from it.
    pub seed: u64,
}

impl ScenarioConfig {
    /// Participants per arm under the exact 1:1 allocation.
    pub fn per_arm(&self) -> u64 {
        self.n / 2
    }
}

/// Structural problems with an arm list.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArmError {
    #[error("arm id must be non-empty")]
    EmptyId,
    #[error("arm id {0:?} is declared more than once")]
    DuplicateId(String),
    #[error("arm {0:?} must have a positive treatment duration")]
    ZeroDuration(String),
}

/// Validation failures for a [`ScenarioConfig`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("{field} must lie in [0, 1], got {value}")]
    ProbabilityOutOfRange { field: &'static str, value: f64 },
    #[error("p_disc_first + p_disc_second must not exceed 1 (the periods are mutually exclusive), got {sum}")]
    PeriodProbabilitiesExceedOne { sum: f64 },
    #[error("n must be even for exact 1:1 allocation, got {n}")]
    OddSampleSize { n: u64 },
    #[error("n must be positive")]
    ZeroSampleSize,
    #[error(transparent)]
    Arm(#[from] ArmError),
}

impl ScenarioError {
    /// The configuration key the error is about, for schema diagnostics.
    pub fn field(&self) -> &'static str {
        match self {
            ScenarioError::ProbabilityOutOfRange { field, .. } => field,
            ScenarioError::PeriodProbabilitiesExceedOne { .. } => "p_disc_first, p_disc_second",
            ScenarioError::OddSampleSize { .. } | ScenarioError::ZeroSampleSize => "n",
            ScenarioError::Arm(_) => "arms",
        }
    }
}

/// Validation failures for an [`EstimandSpec`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimandError {
    #[error("an estimand needs at least two arms to compare, got {found}")]
    TooFewArms { found: usize },
    #[error("event {event:?}, category {category:?} references undeclared arm {arm:?}")]
    UnknownArmReference {
        event: String,
        category: String,
        arm: String,
    },
    #[error("event {event:?} declares category id {id:?} more than once")]
    DuplicateCategoryId { event: String, id: String },
    #[error("event {event:?}, category {category:?} must apply to at least one arm")]
    EmptyApplicableArms { event: String, category: String },
    #[error("event {event:?}, category {category:?} has an invalid window: need 0 <= start < end, got [{start}, {end})")]
    InvalidWindow {
        event: String,
        category: String,
        start: f64,
        end: f64,
    },
    #[error(transparent)]
    Arm(#[from] ArmError),
}

fn validate_arms(arms: &[ArmDefinition]) -> Result<(), ArmError> {
    for (i, arm) in arms.iter().enumerate() {
        if arm.id.is_empty() {
            return Err(ArmError::EmptyId);
        }
        if arm.treatment_duration == 0 {
            return Err(ArmError::ZeroDuration(arm.id.clone()));
        }
        if arms[..i].iter().any(|prev| prev.id == arm.id) {
            return Err(ArmError::DuplicateId(arm.id.clone()));
        }
    }
    Ok(())
}

fn check_probability(field: &'static str, value: f64) -> Result<(), ScenarioError> {
    // NaN fails the range test as well.
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ScenarioError::ProbabilityOutOfRange { field, value })
    }
}

/// Validate a scenario configuration, returning it unchanged on success.
///
/// Validation is idempotent: re-validating an accepted config is a no-op.
pub fn validate_scenario(config: ScenarioConfig) -> Result<ScenarioConfig, ScenarioError> {
    validate_arms(&config.arms)?;
    check_probability("p_ya_control", config.p_ya_control)?;
    check_probability("p_ya_treat", config.p_ya_treat)?;
    check_probability("p_disc_first", config.p_disc_first)?;
    check_probability("p_disc_second", config.p_disc_second)?;
    check_probability("q612", config.q612)?;
    check_probability("alpha", config.alpha)?;
    let sum = config.p_disc_first + config.p_disc_second;
    if sum > 1.0 {
        return Err(ScenarioError::PeriodProbabilitiesExceedOne { sum });
    }
    if config.n == 0 {
        return Err(ScenarioError::ZeroSampleSize);
    }
    if !config.n.is_multiple_of(2) {
        return Err(ScenarioError::OddSampleSize { n: config.n });
    }
    Ok(config)
}

/// Validate an estimand definition, returning it unchanged on success.
pub fn validate_estimand(spec: EstimandSpec) -> Result<EstimandSpec, EstimandError> {
    if spec.arms.len() < 2 {
        return Err(EstimandError::TooFewArms {
            found: spec.arms.len(),
        });
    }
    validate_arms(&spec.arms)?;
    for event in &spec.events {
        for (i, cat) in event.categories.iter().enumerate() {
            if event.categories[..i].iter().any(|prev| prev.id == cat.id) {
                return Err(EstimandError::DuplicateCategoryId {
                    event: event.name.clone(),
                    id: cat.id.clone(),
                });
            }
            if cat.applicable_arms.is_empty() {
                return Err(EstimandError::EmptyApplicableArms {
                    event: event.name.clone(),
                    category: cat.id.clone(),
                });
            }
            for arm in &cat.applicable_arms {
                if !spec.arms.iter().any(|a| &a.id == arm) {
                    return Err(EstimandError::UnknownArmReference {
                        event: event.name.clone(),
                        category: cat.id.clone(),
                        arm: arm.clone(),
                    });
                }
            }
            if let Some(window) = cat.window {
                // NaN comparisons are false, so NaN endpoints fail here too.
                if !(window.start_month >= 0.0 && window.start_month < window.end_month) {
                    return Err(EstimandError::InvalidWindow {
                        event: event.name.clone(),
                        category: cat.id.clone(),
                        start: window.start_month,
                        end: window.end_month,
                    });
                }
            }
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn paper_arms() -> [ArmDefinition; 2] {
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

    fn base_config() -> ScenarioConfig {
        ScenarioConfig {
            n: 1000,
            arms: paper_arms(),
            p_ya_control: 0.4,
            p_ya_treat: 0.4,
            p_ya_excess_timing: ExcessTiming::AfterMonth6,
            p_disc_first: 0.15,
            p_disc_second: 0.15,
            q612: 0.4,
            alpha: 0.05,
            n_reps: 10_000,
            seed: 1,
        }
    }

    fn tb_estimand() -> EstimandSpec {
        EstimandSpec {
            arms: paper_arms().to_vec(),
            endpoint: "not free from tuberculosis at 12 months".into(),
            events: vec![EstimandEvent {
                name: "treatment discontinuation".into(),
                strategy: StrategyKind::Composite,
                categories: vec![
                    IntercurrentEventCategory {
                        id: "disc-0-6".into(),
                        description: "stopping treatment before 6 months".into(),
                        applicable_arms: vec!["6m".into(), "12m".into()],
                        window: Some(MonthWindow {
                            start_month: 0.0,
                            end_month: 6.0,
                        }),
                    },
                    IntercurrentEventCategory {
                        id: "disc-6-12".into(),
                        description: "stopping treatment before 12 months".into(),
                        applicable_arms: vec!["12m".into()],
                        window: Some(MonthWindow {
                            start_month: 6.0,
                            end_month: 12.0,
                        }),
                    },
                ],
            }],
        }
    }

    #[test]
    fn paper_scenario_is_valid() {
        assert!(validate_scenario(base_config()).is_ok());
    }

    #[test]
    fn disc_periods_must_fit_in_one() {
        let config = ScenarioConfig {
            p_disc_first: 0.6,
            p_disc_second: 0.6,
            ..base_config()
        };
        assert!(matches!(
            validate_scenario(config),
            Err(ScenarioError::PeriodProbabilitiesExceedOne { sum }) if (sum - 1.2).abs() < 1e-12
        ));
    }

    #[test]
    fn odd_sample_size_rejected() {
        let config = ScenarioConfig {
            n: 999,
            ..base_config()
        };
        assert_eq!(
            validate_scenario(config),
            Err(ScenarioError::OddSampleSize { n: 999 })
        );
    }

    #[test]
    fn zero_sample_size_rejected() {
        let config = ScenarioConfig {
            n: 0,
            ..base_config()
        };
        assert_eq!(
            validate_scenario(config),
            Err(ScenarioError::ZeroSampleSize)
        );
    }

    #[test]
    fn out_of_range_probability_names_the_field() {
        let config = ScenarioConfig {
            alpha: 1.5,
            ..base_config()
        };
        let err = validate_scenario(config).unwrap_err();
        assert_eq!(err.field(), "alpha");
        let config = ScenarioConfig {
            q612: -0.1,
            ..base_config()
        };
        assert_eq!(validate_scenario(config).unwrap_err().field(), "q612");
    }

    #[test]
    fn nan_probability_rejected() {
        let config = ScenarioConfig {
            p_ya_treat: f64::NAN,
            ..base_config()
        };
        assert!(validate_scenario(config).is_err());
    }

    #[test]
    fn tb_estimand_is_valid() {
        assert!(validate_estimand(tb_estimand()).is_ok());
    }

    #[test]
    fn unknown_arm_reference_rejected() {
        let mut spec = tb_estimand();
        spec.events[0].categories[1].applicable_arms = vec!["9m".into()];
        assert!(matches!(
            validate_estimand(spec),
            Err(EstimandError::UnknownArmReference { arm, .. }) if arm == "9m"
        ));
    }

    #[test]
    fn single_arm_rejected() {
        let mut spec = tb_estimand();
        spec.arms.truncate(1);
        spec.events.clear();
        assert_eq!(
            validate_estimand(spec),
            Err(EstimandError::TooFewArms { found: 1 })
        );
    }

    #[test]
    fn duplicate_category_id_rejected() {
        let mut spec = tb_estimand();
        spec.events[0].categories[1].id = "disc-0-6".into();
        assert!(matches!(
            validate_estimand(spec),
            Err(EstimandError::DuplicateCategoryId { id, .. }) if id == "disc-0-6"
        ));
    }

    #[test]
    fn duplicate_arm_id_rejected() {
        let mut spec = tb_estimand();
        spec.arms[1].id = "6m".into();
        spec.events.clear();
        assert!(matches!(
            validate_estimand(spec),
            Err(EstimandError::Arm(ArmError::DuplicateId(id))) if id == "6m"
        ));
    }

    #[test]
    fn backwards_window_rejected() {
        let mut spec = tb_estimand();
        spec.events[0].categories[0].window = Some(MonthWindow {
            start_month: 6.0,
            end_month: 6.0,
        });
        assert!(matches!(
            validate_estimand(spec),
            Err(EstimandError::InvalidWindow { .. })
        ));
    }

    #[test]
    fn validation_is_idempotent_on_presets() {
        for name in presets::PRESET_NAMES {
            let config = presets::preset(name).unwrap();
            let once = validate_scenario(config.clone()).unwrap();
            let twice = validate_scenario(once.clone()).unwrap();
            assert_eq!(once, twice);
            assert_eq!(once, config);
        }
    }
}
