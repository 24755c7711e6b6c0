//! Simulation engine and definition linter for composite-strategy estimands
//! in two-arm trials.
//!
//! A composite strategy folds an intercurrent event (treatment
//! discontinuation, rescue medication, ...) into the endpoint. When the
//! event can be categorised so that some category exists in one arm only -
//! e.g. discontinuation between months 6 and 12 when comparing a 6- against
//! a 12-month regimen - the arms end up with different outcome definitions
//! and the comparison stops being causal: the long arm accrues "excess"
//! events the short arm cannot have by construction.
//!
//! The crate quantifies that artifact two independent ways and lints for it
//! structurally:
//!
//! - [`dgm`] + [`engine`]: seeded Monte Carlo over cohorts with coupled
//!   potential outcomes, aggregating mean risk difference, rejection
//!   fraction and excess-event counts with Monte Carlo standard errors;
//! - [`oracle`]: the same population quantities in closed form, by exact
//!   enumeration of the per-arm joint laws;
//! - [`checker`]: a structural verdict on declarative estimand definitions,
//!   flagging every category that fails to apply to all arms.
//!
//! [`presets`] registers the standard study configurations, and [`stats`]
//! provides the self-contained inference layer (pooled t-test on top of an
//! in-house Student-t CDF).

pub mod checker;
pub mod config;
pub mod dgm;
pub mod engine;
pub mod model;
pub mod oracle;
pub mod outcomes;
pub mod presets;
pub mod seed;
pub mod stats;

pub use checker::{check_estimand, render_outcome_definitions, Verdict, VerdictStatus};
pub use dgm::{assign_arms, generate_cohort, Arm, DiscCategory, PatientRecord};
pub use engine::{
    estimate_required_reps, run_rep, run_simulation, summarize, PerformanceSummary, RepResult,
    SimulationOutput,
};
pub use model::{
    validate_estimand, validate_scenario, ArmDefinition, EstimandSpec, IntercurrentEventCategory,
    ScenarioConfig, StrategyKind,
};
pub use oracle::{joint_distribution, summarize_population, OracleSummary};
pub use outcomes::{
    components_under, composite_outcome, decomposition_report, excess_indicator, ComponentBundle,
    DecompositionReport,
};
