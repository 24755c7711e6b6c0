//! Monte Carlo engine: runs independent trial replications, collects
//! per-replication results, and aggregates the three performance measures
//! (mean risk difference, rejection fraction, mean excess-event count) with
//! their Monte Carlo standard errors.
//!
//! Replication `r` draws from substreams derived with
//! [`mix_seed`]`(master, r)`, so scheduling replications across any number
//! of threads cannot change any result. The
//! summary is a fixed-order fold over the per-replication table, which makes
//! it bit-for-bit reproducible from a dumped CSV.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dgm::{assign_arms, generate_cohort, Arm, DgmError};
use crate::model::ScenarioConfig;
use crate::outcomes::{components_under, composite_outcome, excess_indicator};
use crate::seed::mix_seed;
use crate::stats::{mcse_mean, mcse_proportion, pooled_t_test, StatError};

/// Stream tags for the stages within one replication.
const COHORT_STREAM: u64 = 1;
const ASSIGN_STREAM: u64 = 2;

/// One replication's results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepResult {
    pub rep_index: u64,
    /// Estimated risk difference of the composite outcome.
    pub theta_hat: f64,
    /// Two-sided p-value of the pooled t-test.
    pub p_value: f64,
    /// Whether p < alpha.
    pub rejected: bool,
    /// Arm-only excess events among the n/2 control-arm patients.
    pub excess_count: u64,
}

/// Risk-difference and rejection figures restated in percentage points, so
/// reports cannot be misread across unit conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercentSummary {
    pub mean_rd_pp: f64,
    pub mcse_rd_pp: f64,
    pub rejection_pp: f64,
    pub mcse_rejection_pp: f64,
}

/// Aggregated performance measures with Monte Carlo standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceSummary {
    pub n_reps: u64,
    pub mean_rd: f64,
    pub mcse_rd: f64,
    pub rejection_fraction: f64,
    pub mcse_rejection: f64,
    pub mean_excess: f64,
    pub mcse_excess: f64,
    pub seed: u64,
    /// Preset name when the run came from the registry.
    pub preset: Option<String>,
    pub percent: PercentSummary,
}

/// Per-replication table plus its aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub reps: Vec<RepResult>,
    pub summary: PerformanceSummary,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Dgm(#[from] DgmError),
    #[error(transparent)]
    Stat(#[from] StatError),
    #[error("target MCSE must be positive, got {0}")]
    NonPositiveTarget(f64),
    #[error("per-rep CSV line {line}: {detail}")]
    Csv { line: usize, detail: String },
}

/// Run one replication: generate the cohort, randomize, derive each arm's
/// composite outcome under its own definition, test, and count excess
/// events. Deterministic given `(config, rep_index, master_seed)`.
pub fn run_rep(
    config: &ScenarioConfig,
    rep_index: u64,
    master_seed: u64,
) -> Result<RepResult, EngineError> {
    let rep_seed = mix_seed(master_seed, rep_index);
    let mut cohort = generate_cohort(config, mix_seed(rep_seed, COHORT_STREAM))?;
    assign_arms(&mut cohort, mix_seed(rep_seed, ASSIGN_STREAM))?;

    let per_arm = cohort.len() / 2;
    let mut y_treat = Vec::with_capacity(per_arm);
    let mut y_control = Vec::with_capacity(per_arm);
    let mut excess_count = 0u64;
    for patient in &cohort {
        let arm = patient
            .assigned_arm
            .expect("assign_arms fills every record");
        let y = composite_outcome(&components_under(patient, arm));
        match arm {
            Arm::Treat => y_treat.push(y),
            Arm::Control => {
                y_control.push(y);
                if excess_indicator(patient) {
                    excess_count += 1;
                }
            }
        }
    }

    let test = pooled_t_test(&y_treat, &y_control, config.alpha)?;
    Ok(RepResult {
        rep_index,
        theta_hat: test.estimate,
        p_value: test.p_value,
        rejected: test.rejected,
        excess_count,
    })
}

/// Aggregate a per-replication table into the performance summary.
///
/// A pure, fixed-order fold: re-running it over a table parsed back from
/// [`reps_to_csv`] reproduces the summary exactly.
pub fn summarize(
    reps: &[RepResult],
    seed: u64,
    preset: Option<&str>,
) -> Result<PerformanceSummary, StatError> {
    let n = reps.len() as f64;
    let thetas: Vec<f64> = reps.iter().map(|r| r.theta_hat).collect();
    let excess: Vec<f64> = reps.iter().map(|r| r.excess_count as f64).collect();

    let mean_rd = thetas.iter().sum::<f64>() / n;
    let mcse_rd = mcse_mean(&thetas)?;
    let rejection_fraction = reps.iter().filter(|r| r.rejected).count() as f64 / n;
    let mcse_rejection = mcse_proportion(rejection_fraction, reps.len() as u64)?;
    let mean_excess = excess.iter().sum::<f64>() / n;
    let mcse_excess = mcse_mean(&excess)?;

    Ok(PerformanceSummary {
        n_reps: reps.len() as u64,
        mean_rd,
        mcse_rd,
        rejection_fraction,
        mcse_rejection,
        mean_excess,
        mcse_excess,
        seed,
        preset: preset.map(str::to_owned),
        percent: PercentSummary {
            mean_rd_pp: 100.0 * mean_rd,
            mcse_rd_pp: 100.0 * mcse_rd,
            rejection_pp: 100.0 * rejection_fraction,
            mcse_rejection_pp: 100.0 * mcse_rejection,
        },
    })
}

/// Run `config.n_reps` independent replications (in parallel) and aggregate.
///
/// Results are identical for any worker count; cap workers with the
/// `RAYON_NUM_THREADS` environment variable.
pub fn run_simulation(config: &ScenarioConfig) -> Result<SimulationOutput, EngineError> {
    let reps: Vec<RepResult> = (0..config.n_reps)
        .into_par_iter()
        .map(|rep_index| run_rep(config, rep_index, config.seed))
        .collect::<Result<_, _>>()?;
    let summary = summarize(&reps, config.seed, None)?;
    Ok(SimulationOutput { reps, summary })
}

/// Estimate how many replications reach `target_mcse` for the mean risk
/// difference, from a pilot run: `ceil((sd(theta_hat) / target)^2)`, at
/// least 1.
pub fn estimate_required_reps(
    config: &ScenarioConfig,
    target_mcse: f64,
    pilot_reps: u64,
) -> Result<u64, EngineError> {
    if target_mcse.is_nan() || target_mcse <= 0.0 {
        return Err(EngineError::NonPositiveTarget(target_mcse));
    }
    let pilot: Vec<RepResult> = (0..pilot_reps)
        .into_par_iter()
        .map(|rep_index| run_rep(config, rep_index, config.seed))
        .collect::<Result<_, _>>()?;
    let thetas: Vec<f64> = pilot.iter().map(|r| r.theta_hat).collect();
    // sd = mcse * sqrt(n)
    let sd = mcse_mean(&thetas)? * (pilot_reps as f64).sqrt();
    let required = (sd / target_mcse).powi(2).ceil() as u64;
    Ok(required.max(1))
}

/// Serialize a per-replication table as CSV with columns
/// `rep_index,theta_hat,p_value,rejected,excess_count`.
///
/// Floats use the shortest round-trip representation, so parsing the dump
/// back recovers them bit-for-bit.
pub fn reps_to_csv(reps: &[RepResult]) -> String {
    let mut out = String::from("rep_index,theta_hat,p_value,rejected,excess_count\n");
    for rep in reps {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            rep.rep_index, rep.theta_hat, rep.p_value, rep.rejected, rep.excess_count
        ));
    }
    out
}

/// Parse a table produced by [`reps_to_csv`].
pub fn reps_from_csv(text: &str) -> Result<Vec<RepResult>, EngineError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "rep_index,theta_hat,p_value,rejected,excess_count")) => {}
        Some((_, header)) => {
            return Err(EngineError::Csv {
                line: 1,
                detail: format!("unexpected header {header:?}"),
            })
        }
        None => {
            return Err(EngineError::Csv {
                line: 1,
                detail: "empty input".into(),
            })
        }
    }

    let mut reps = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(EngineError::Csv {
                line: idx + 1,
                detail: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let parse_err = |what: &str| EngineError::Csv {
            line: idx + 1,
            detail: format!("cannot parse {what}"),
        };
        reps.push(RepResult {
            rep_index: fields[0].parse().map_err(|_| parse_err("rep_index"))?,
            theta_hat: fields[1].parse().map_err(|_| parse_err("theta_hat"))?,
            p_value: fields[2].parse().map_err(|_| parse_err("p_value"))?,
            rejected: fields[3].parse().map_err(|_| parse_err("rejected"))?,
            excess_count: fields[4].parse().map_err(|_| parse_err("excess_count"))?,
        });
    }
    Ok(reps)
}
