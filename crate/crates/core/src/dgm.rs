//! Data-generating mechanism: cohorts of patients with coupled potential
//! outcomes under both arms, plus exact 1:1 block randomization.
//!
//! Each patient carries one latent discontinuation behaviour shared across
//! arms and the clinical outcome under both assignments, so per-patient
//! counterfactual contrasts are well defined. Coupling the arms this way
//! leaves every marginal quantity untouched; it only pins down the joint
//! behaviour a marginal-only simulation leaves unspecified.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ScenarioConfig;

/// Latent discontinuation behaviour, drawn once per patient.
///
/// `First` (months 0-6) is reachable under either assignment; `Second`
/// (months 6-12) can only materialize in the long-duration arm, where
/// treatment is still ongoing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscCategory {
    None,
    First,
    Second,
}

impl DiscCategory {
    /// Stable lower-case name used in cohort dumps.
    pub fn as_str(self) -> &'static str {
        match self {
            DiscCategory::None => "none",
            DiscCategory::First => "first",
            DiscCategory::Second => "second",
        }
    }
}

/// Realized treatment assignment. `Treat` is the short-duration arm (Z = 1),
/// `Control` the long-duration arm (Z = 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Treat,
    Control,
}

impl Arm {
    /// The assignment indicator Z.
    pub fn z(self) -> u8 {
        match self {
            Arm::Treat => 1,
            Arm::Control => 0,
        }
    }
}

/// One patient's potential outcomes under both arms, plus their realized
/// assignment once [`assign_arms`] has run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatientRecord {
    pub id: u64,
    /// Adverse clinical outcome under the control (long) arm.
    pub ya_control: bool,
    /// Adverse clinical outcome under the treated (short) arm.
    pub ya_treat: bool,
    /// Latent discontinuation behaviour, shared across arms.
    pub disc_category: DiscCategory,
    pub assigned_arm: Option<Arm>,
}

/// Errors from cohort generation and assignment.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DgmError {
    #[error(
        "q612 and p_ya_control are jointly infeasible: the implied \
         P(Y_a = 1 | no late discontinuation) = {implied} falls outside [0, 1]"
    )]
    MarginalInfeasible { implied: f64 },
    #[error("cohort size must be even for 1:1 allocation, got {0}")]
    OddCohortSize(usize),
}

/// Conditional probability of the control-arm clinical outcome outside the
/// late-discontinuation class, solved so the marginal equals `p_ya_control`:
///
/// `r = (p_ya_control - q612 p_disc_second) / (1 - p_disc_second)`
///
/// Exact algebra instead of rejection sampling, so infeasible parameter sets
/// fail loudly rather than skewing the marginal.
pub(crate) fn conditional_ya_probability(config: &ScenarioConfig) -> Result<f64, DgmError> {
    let pd2 = config.p_disc_second;
    if pd2 >= 1.0 {
        // Everyone is in the late class: the marginal is q612 itself and the
        // conditional for the (empty) complement never gets sampled.
        if (config.q612 - config.p_ya_control).abs() > 1e-12 {
            return Err(DgmError::MarginalInfeasible {
                implied: f64::INFINITY,
            });
        }
        return Ok(0.0);
    }
    let implied = (config.p_ya_control - config.q612 * pd2) / (1.0 - pd2);
    // Tolerate rounding right at the boundary.
    if (-1e-12..0.0).contains(&implied) {
        return Ok(0.0);
    }
    if (1.0..=1.0 + 1e-12).contains(&implied) {
        return Ok(1.0);
    }
    if !(0.0..=1.0).contains(&implied) {
        return Err(DgmError::MarginalInfeasible { implied });
    }
    Ok(implied)
}

/// Cross-arm coupling of the clinical outcome. The coupling is monotone:
/// whichever arm has the larger marginal dominates patient-by-patient, and
/// equal marginals give a per-patient sharp null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Coupling {
    /// Equal marginals: ya_treat = ya_control for every patient.
    Equal,
    /// p_ya_treat > p_ya_control: ya_treat = ya_control OR extra event.
    Upward { extra: f64 },
    /// p_ya_treat < p_ya_control: ya_treat = ya_control AND kept event.
    Downward { keep: f64 },
}

impl Coupling {
    pub(crate) fn from_config(config: &ScenarioConfig) -> Self {
        let (pc, pt) = (config.p_ya_control, config.p_ya_treat);
        if pt > pc {
            Coupling::Upward {
                extra: (pt - pc) / (1.0 - pc),
            }
        } else if pt < pc {
            Coupling::Downward { keep: pt / pc }
        } else {
            Coupling::Equal
        }
    }
}

/// Generate a cohort of `config.n` patients, deterministically from
/// `(config, seed)`.
///
/// Per patient: the latent discontinuation class is drawn with
/// `P(First) = p_disc_first`, `P(Second) = p_disc_second`; the control-arm
/// clinical outcome is drawn with `P = q612` inside the late class and the
/// solved conditional elsewhere; the treated-arm outcome is coupled
/// monotonically to the control-arm one. Each patient consumes exactly
/// three uniforms, in that order.
pub fn generate_cohort(config: &ScenarioConfig, seed: u64) -> Result<Vec<PatientRecord>, DgmError> {
    let p_first = config.p_disc_first;
    let p_second = config.p_disc_second;
    let p_ya_other = conditional_ya_probability(config)?;
    let coupling = Coupling::from_config(config);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cohort = Vec::with_capacity(config.n as usize);
    for id in 0..config.n {
        let u_disc: f64 = rng.random();
        let disc_category = if u_disc < p_first {
            DiscCategory::First
        } else if u_disc < p_first + p_second {
            DiscCategory::Second
        } else {
            DiscCategory::None
        };

        let p_ya = match disc_category {
            DiscCategory::Second => config.q612,
            _ => p_ya_other,
        };
        let ya_control = rng.random::<f64>() < p_ya;

        let u_couple: f64 = rng.random();
        let ya_treat = match coupling {
            Coupling::Equal => ya_control,
            Coupling::Upward { extra } => ya_control || u_couple < extra,
            Coupling::Downward { keep } => ya_control && u_couple < keep,
        };

        cohort.push(PatientRecord {
            id,
            ya_control,
            ya_treat,
            disc_category,
            assigned_arm: None,
        });
    }
    Ok(cohort)
}

/// Assign exactly half the cohort to each arm by a uniformly random
/// permutation split, deterministically from `seed`.
pub fn assign_arms(cohort: &mut [PatientRecord], seed: u64) -> Result<(), DgmError> {
    let n = cohort.len();
    if !n.is_multiple_of(2) {
        return Err(DgmError::OddCohortSize(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for (rank, &idx) in order.iter().enumerate() {
        cohort[idx].assigned_arm = Some(if rank < n / 2 {
            Arm::Treat
        } else {
            Arm::Control
        });
    }
    Ok(())
}

/// Render a cohort as CSV with columns
/// `id,ya_control,ya_treat,disc_category,assigned_arm`.
///
/// Binary fields are 0/1; `assigned_arm` is the Z indicator, or empty for an
/// unassigned cohort.
pub fn cohort_to_csv(cohort: &[PatientRecord]) -> String {
    let mut out = String::from("id,ya_control,ya_treat,disc_category,assigned_arm\n");
    for patient in cohort {
        let arm = patient
            .assigned_arm
            .map(|a| a.z().to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            patient.id,
            patient.ya_control as u8,
            patient.ya_treat as u8,
            patient.disc_category.as_str(),
            arm
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn zero_disc_probabilities_give_no_discontinuation() {
        let mut config = presets::preset("scenario1-independence").unwrap();
        config.p_disc_first = 0.0;
        config.p_disc_second = 0.0;
        let cohort = generate_cohort(&config, 7).unwrap();
        assert!(cohort.iter().all(|p| p.disc_category == DiscCategory::None));
    }

    #[test]
    fn scenario2_extra_event_probability() {
        // Solving 0.4 + 0.6 x = 0.5 gives x = 1/6.
        let config = presets::preset("scenario2-independence").unwrap();
        match Coupling::from_config(&config) {
            Coupling::Upward { extra } => assert!((extra - 1.0 / 6.0).abs() < 1e-15),
            other => panic!("expected upward coupling, got {other:?}"),
        }
    }

    #[test]
    fn equal_marginals_couple_sharply() {
        let config = presets::preset("scenario1-calibrated").unwrap();
        let cohort = generate_cohort(&config, 99).unwrap();
        assert!(cohort.iter().all(|p| p.ya_treat == p.ya_control));
    }

    #[test]
    fn infeasible_conditional_mass_fails_loudly() {
        let mut config = presets::preset("scenario1-independence").unwrap();
        config.p_ya_control = 0.2;
        config.q612 = 1.0;
        config.p_disc_second = 0.3;
        // 1.0 * 0.3 > 0.2: more conditional mass than the marginal allows.
        assert!(matches!(
            generate_cohort(&config, 1),
            Err(DgmError::MarginalInfeasible { .. })
        ));
    }

    #[test]
    fn infeasible_complement_also_fails() {
        let mut config = presets::preset("scenario1-independence").unwrap();
        config.p_ya_control = 0.95;
        config.q612 = 0.0;
        config.p_disc_second = 0.3;
        // Implied conditional (0.95 - 0) / 0.7 > 1.
        assert!(matches!(
            generate_cohort(&config, 1),
            Err(DgmError::MarginalInfeasible { .. })
        ));
    }

    #[test]
    fn independence_recovers_marginal_as_conditional() {
        let config = presets::preset("scenario1-independence").unwrap();
        let r = conditional_ya_probability(&config).unwrap();
        assert!((r - config.p_ya_control).abs() < 1e-15);
    }

    #[test]
    fn cohort_generation_is_deterministic() {
        let config = presets::preset("scenario2-calibrated").unwrap();
        let a = generate_cohort(&config, 1234).unwrap();
        let b = generate_cohort(&config, 1234).unwrap();
        assert_eq!(a, b);
        let c = generate_cohort(&config, 1235).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn assignment_splits_exactly_in_half() {
        let config = presets::preset("scenario1-independence").unwrap();
        let mut cohort = generate_cohort(&config, 5).unwrap();
        assign_arms(&mut cohort, 6).unwrap();
        let treat = cohort
            .iter()
            .filter(|p| p.assigned_arm == Some(Arm::Treat))
            .count();
        assert_eq!(treat, 500);
        assert_eq!(cohort.len() - treat, 500);
    }

    #[test]
    fn two_patient_cohort_gets_one_per_arm() {
        let mut config = presets::preset("scenario1-independence").unwrap();
        config.n = 2;
        let mut cohort = generate_cohort(&config, 3).unwrap();
        assign_arms(&mut cohort, 4).unwrap();
        let zs: Vec<u8> = cohort.iter().map(|p| p.assigned_arm.unwrap().z()).collect();
        let mut sorted = zs.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1]);
    }

    #[test]
    fn assignment_is_deterministic() {
        let config = presets::preset("scenario1-independence").unwrap();
        let mut a = generate_cohort(&config, 11).unwrap();
        let mut b = a.clone();
        assign_arms(&mut a, 21).unwrap();
        assign_arms(&mut b, 21).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn odd_cohort_rejected() {
        let mut cohort = vec![PatientRecord {
            id: 0,
            ya_control: false,
            ya_treat: false,
            disc_category: DiscCategory::None,
            assigned_arm: None,
        }];
        assert_eq!(assign_arms(&mut cohort, 0), Err(DgmError::OddCohortSize(1)));
    }

    #[test]
    fn shared_window_frequency_matches_both_arms() {
        // P(disc in 0-6) should be near 0.15 in both realized arms.
        let config = presets::preset("scenario1-independence").unwrap();
        let mut cohort = generate_cohort(&config, 8).unwrap();
        assign_arms(&mut cohort, 9).unwrap();
        for arm in [Arm::Treat, Arm::Control] {
            let in_arm: Vec<_> = cohort
                .iter()
                .filter(|p| p.assigned_arm == Some(arm))
                .collect();
            let first = in_arm
                .iter()
                .filter(|p| p.disc_category == DiscCategory::First)
                .count() as f64;
            let freq = first / in_arm.len() as f64;
            let se = (0.15f64 * 0.85 / in_arm.len() as f64).sqrt();
            assert!(
                (freq - 0.15).abs() < 3.0 * se,
                "arm {arm:?}: freq {freq} vs 0.15 +- {se}"
            );
        }
    }

    #[test]
    fn cohort_csv_shape() {
        let mut config = presets::preset("scenario1-independence").unwrap();
        config.n = 4;
        let mut cohort = generate_cohort(&config, 2).unwrap();
        assign_arms(&mut cohort, 2).unwrap();
        let csv = cohort_to_csv(&cohort);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(
            lines[0],
            "id,ya_control,ya_treat,disc_category,assigned_arm"
        );
        assert!(lines[1].starts_with("0,"));
    }
}
