//! Strict JSON ingestion for scenario configurations and estimand
//! definitions.
//!
//! Parsing is strict: unknown keys are rejected with the offending key
//! named, so a misspelled field can never be silently ignored and corrupt a
//! study. Structural validation runs as part of parsing, and its failures
//! surface as schema violations naming the field.

use thiserror::Error;

use crate::model::{validate_estimand, validate_scenario, EstimandSpec, ScenarioConfig};

/// Errors from parsing a configuration document.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("malformed JSON at line {line}, column {column}: {detail}")]
    MalformedJson {
        line: usize,
        column: usize,
        detail: String,
    },
    #[error("schema violation on {key:?}: {detail}")]
    SchemaViolation { key: String, detail: String },
}

/// Pull the backtick-quoted token out of a serde message like
/// ``unknown field `alhpa`, expected one of ...``.
fn quoted_key(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let end = start + message[start..].find('`')?;
    Some(message[start..end].to_string())
}

fn classify(err: serde_json::Error) -> ParseError {
    if err.is_data() {
        let detail = err.to_string();
        ParseError::SchemaViolation {
            key: quoted_key(&detail).unwrap_or_else(|| "(document)".into()),
            detail,
        }
    } else {
        ParseError::MalformedJson {
            line: err.line(),
            column: err.column(),
            detail: err.to_string(),
        }
    }
}

/// Parse and validate a scenario configuration from JSON text.
pub fn parse_scenario_json(text: &str) -> Result<ScenarioConfig, ParseError> {
    let config: ScenarioConfig = serde_json::from_str(text).map_err(classify)?;
    validate_scenario(config).map_err(|err| ParseError::SchemaViolation {
        key: err.field().to_string(),
        detail: err.to_string(),
    })
}

/// Parse and validate an estimand definition from JSON text.
pub fn parse_estimand_json(text: &str) -> Result<EstimandSpec, ParseError> {
    let spec: EstimandSpec = serde_json::from_str(text).map_err(classify)?;
    validate_estimand(spec).map_err(|err| ParseError::SchemaViolation {
        key: "estimand".into(),
        detail: err.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StrategyKind;
    use crate::presets;

    fn scenario_json() -> String {
        serde_json::to_string_pretty(&presets::preset("scenario1-calibrated").unwrap()).unwrap()
    }

    #[test]
    fn round_trips_a_preset() {
        let parsed = parse_scenario_json(&scenario_json()).unwrap();
        assert_eq!(parsed, presets::preset("scenario1-calibrated").unwrap());
    }

    #[test]
    fn unknown_key_is_named() {
        let text = scenario_json().replacen("\"alpha\"", "\"allpha\"", 1);
        match parse_scenario_json(&text) {
            Err(ParseError::SchemaViolation { key, .. }) => assert_eq!(key, "allpha"),
            other => panic!("expected schema violation, got {other:?}"),
        }
    }

    #[test]
    fn missing_key_is_named() {
        let mut value: serde_json::Value = serde_json::from_str(&scenario_json()).unwrap();
        value.as_object_mut().unwrap().remove("alpha");
        match parse_scenario_json(&value.to_string()) {
            Err(ParseError::SchemaViolation { key, .. }) => assert_eq!(key, "alpha"),
            other => panic!("expected schema violation, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_value_is_a_schema_violation_on_the_field() {
        let mut value: serde_json::Value = serde_json::from_str(&scenario_json()).unwrap();
        value["alpha"] = serde_json::json!(1.5);
        match parse_scenario_json(&value.to_string()) {
            Err(ParseError::SchemaViolation { key, .. }) => assert_eq!(key, "alpha"),
            other => panic!("expected schema violation, got {other:?}"),
        }
    }

    #[test]
    fn trailing_garbage_is_malformed_json() {
        let text = format!("{} trailing", scenario_json());
        assert!(matches!(
            parse_scenario_json(&text),
            Err(ParseError::MalformedJson { .. })
        ));
    }

    #[test]
    fn malformed_json_reports_position() {
        match parse_scenario_json("{\n  \"n\": 1000,,\n}") {
            Err(ParseError::MalformedJson { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("expected malformed JSON, got {other:?}"),
        }
    }

    #[test]
    fn estimand_strategies_round_trip() {
        let text = r#"{
            "arms": [
                {"id": "6m", "label": "6-month", "treatment_duration": 6},
                {"id": "12m", "label": "12-month", "treatment_duration": 12}
            ],
            "endpoint": "not free from tuberculosis at 12 months",
            "events": [
                {
                    "name": "treatment discontinuation",
                    "strategy": "while_on_treatment",
                    "categories": [
                        {
                            "id": "disc-0-6",
                            "description": "stopping treatment before 6 months",
                            "applicable_arms": ["6m", "12m"],
                            "window": {"start_month": 0, "end_month": 6}
                        }
                    ]
                },
                {
                    "name": "rescue medication",
                    "strategy": {"other": "hypothetical"},
                    "categories": [
                        {
                            "id": "rescue",
                            "description": "use of rescue medication",
                            "applicable_arms": ["6m", "12m"]
                        }
                    ]
                }
            ]
        }"#;
        let spec = parse_estimand_json(text).unwrap();
        assert_eq!(spec.events[0].strategy, StrategyKind::WhileOnTreatment);
        assert_eq!(
            spec.events[1].strategy,
            StrategyKind::Other("hypothetical".into())
        );
        let serialized = serde_json::to_string(&spec).unwrap();
        let reparsed = parse_estimand_json(&serialized).unwrap();
        assert_eq!(spec, reparsed);
    }

    #[test]
    fn invalid_estimand_is_a_schema_violation() {
        let text = r#"{
            "arms": [{"id": "only", "label": "only arm", "treatment_duration": 6}],
            "endpoint": "anything",
            "events": []
        }"#;
        assert!(matches!(
            parse_estimand_json(text),
            Err(ParseError::SchemaViolation { .. })
        ));
    }
}
