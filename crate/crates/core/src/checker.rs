//! Structural check of estimand definitions: a composite (or
//! while-on-treatment) strategy whose event categories do not apply to every
//! arm defines the outcome differently across arms, so the between-arm
//! contrast stops being a causal comparison.
//!
//! The check is purely structural - it reads definitions, never data or
//! probabilities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{EstimandSpec, StrategyKind};

/// Checker outcome for an estimand definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    /// Every assessed category applies to all arms: the composite contrast
    /// compares the same outcome definition across arms.
    Causal,
    /// At least one category applies to a proper subset of the arms.
    NonCausal,
    /// No event uses a strategy the rule covers.
    Unassessed,
}

/// A category that applies to some arms only, recorded per event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub event: String,
    pub strategy: StrategyKind,
    pub category: String,
    /// Arms (in declaration order) in which the category cannot occur.
    pub missing_arms: Vec<String>,
}

/// Full verdict: status, the offending categories, and the outcome
/// definition each arm ends up with under the declared strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub offending: Vec<Offender>,
    pub rendered_definitions: BTreeMap<String, String>,
}

/// Apply the categorization rule to a validated estimand definition.
///
/// For every event handled by a composite or while-on-treatment strategy,
/// each category whose applicability set is a proper subset of the declared
/// arms is an offender. Any offender makes the estimand `NonCausal`; a spec
/// whose events all use other strategies is `Unassessed`. A spec with no
/// events compares the bare endpoint under identical definitions and is
/// therefore `Causal`.
pub fn check_estimand(spec: &EstimandSpec) -> Verdict {
    let mut offending = Vec::new();
    let mut any_assessable = false;

    for event in &spec.events {
        if !event.strategy.is_assessable() {
            continue;
        }
        any_assessable = true;
        for category in &event.categories {
            let missing_arms: Vec<String> = spec
                .arms
                .iter()
                .filter(|arm| !category.applies_to(&arm.id))
                .map(|arm| arm.id.clone())
                .collect();
            if !missing_arms.is_empty() {
                offending.push(Offender {
                    event: event.name.clone(),
                    strategy: event.strategy.clone(),
                    category: category.id.clone(),
                    missing_arms,
                });
            }
        }
    }

    let status = if !offending.is_empty() {
        VerdictStatus::NonCausal
    } else if any_assessable || spec.events.is_empty() {
        VerdictStatus::Causal
    } else {
        VerdictStatus::Unassessed
    };

    Verdict {
        status,
        offending,
        rendered_definitions: render_outcome_definitions(spec),
    }
}

/// The outcome definition each arm ends up with: the endpoint joined with
/// `" or <category description>"` for every category applicable to that
/// arm, in declaration order.
pub fn render_outcome_definitions(spec: &EstimandSpec) -> BTreeMap<String, String> {
    spec.arms
        .iter()
        .map(|arm| {
            let mut text = spec.endpoint.clone();
            for event in &spec.events {
                for category in &event.categories {
                    if category.applies_to(&arm.id) {
                        text.push_str(" or ");
                        text.push_str(&category.description);
                    }
                }
            }
            (arm.id.clone(), text)
        })
        .collect()
}
