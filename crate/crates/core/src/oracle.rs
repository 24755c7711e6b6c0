//! Closed-form computation of every population quantity the Monte Carlo
//! engine estimates, by exact enumeration of the small per-arm joint
//! distribution of (clinical outcome, discontinuation class).
//!
//! This module re-derives the distribution directly from the configuration
//! instead of calling into the sampler, so the enumeration stays an
//! independent route against which the simulation is checked.

use serde::{Deserialize, Serialize};

use crate::dgm::{DgmError, DiscCategory};
use crate::model::ScenarioConfig;
use crate::stats::{normal_cdf, normal_quantile};

/// One probability atom of a per-arm joint law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub ya: bool,
    pub disc: DiscCategory,
    pub probability: f64,
}

/// The exact joint laws under each arm. The treated arm marginalizes the
/// latent late-discontinuation class into `None`, because treatment has
/// already ended when that window opens.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub treat: Vec<Atom>,
    pub control: Vec<Atom>,
}

impl JointDistribution {
    fn mass(atoms: &[Atom], ya: bool, disc: DiscCategory) -> f64 {
        atoms
            .iter()
            .filter(|a| a.ya == ya && a.disc == disc)
            .map(|a| a.probability)
            .sum()
    }
}

/// Closed-form population summary for a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    /// P(composite unfavourable | treated arm).
    pub p_event_treat: f64,
    /// P(composite unfavourable | control arm).
    pub p_event_control: f64,
    /// True risk difference `p_event_treat - p_event_control`.
    pub true_rd: f64,
    /// Expected count of arm-only excess events among the n/2 control-arm
    /// patients.
    pub expected_excess: f64,
    /// Power of the two-sided level-alpha test under the normal
    /// approximation.
    pub asymptotic_rejection: f64,
}

/// P(Y_a = 1 | disc class != Second) in the control arm, solved so the
/// marginal equals `p_ya_control`. Mirrors the sampler's law; kept separate
/// so the oracle can be audited on its own.
fn control_ya_outside_late_class(config: &ScenarioConfig) -> Result<f64, DgmError> {
    let pd2 = config.p_disc_second;
    if pd2 >= 1.0 {
        if (config.q612 - config.p_ya_control).abs() > 1e-12 {
            return Err(DgmError::MarginalInfeasible {
                implied: f64::INFINITY,
            });
        }
        return Ok(0.0);
    }
    let implied = (config.p_ya_control - config.q612 * pd2) / (1.0 - pd2);
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

/// P(Y_a = 1 under the treated arm | the control-arm conditional is
/// `p_control`), under the monotone coupling of the two arms.
fn treat_ya_given_control_conditional(config: &ScenarioConfig, p_control: f64) -> f64 {
    let (pc, pt) = (config.p_ya_control, config.p_ya_treat);
    if pt > pc {
        let extra = (pt - pc) / (1.0 - pc);
        p_control + (1.0 - p_control) * extra
    } else if pt < pc {
        p_control * (pt / pc)
    } else {
        p_control
    }
}

/// Enumerate the exact per-arm joint laws of (Y_a, discontinuation class).
pub fn joint_distribution(config: &ScenarioConfig) -> Result<JointDistribution, DgmError> {
    let pd1 = config.p_disc_first;
    let pd2 = config.p_disc_second;
    let p_none = 1.0 - pd1 - pd2;
    let r = control_ya_outside_late_class(config)?;
    let q = config.q612;

    let control = vec![
        Atom {
            ya: true,
            disc: DiscCategory::First,
            probability: pd1 * r,
        },
        Atom {
            ya: false,
            disc: DiscCategory::First,
            probability: pd1 * (1.0 - r),
        },
        Atom {
            ya: true,
            disc: DiscCategory::Second,
            probability: pd2 * q,
        },
        Atom {
            ya: false,
            disc: DiscCategory::Second,
            probability: pd2 * (1.0 - q),
        },
        Atom {
            ya: true,
            disc: DiscCategory::None,
            probability: p_none * r,
        },
        Atom {
            ya: false,
            disc: DiscCategory::None,
            probability: p_none * (1.0 - r),
        },
    ];

    // Treated arm: the latent Second class cannot discontinue (treatment has
    // ended), so its mass folds into None; Y_a keeps the coupled law of the
    // class it came from.
    let t_first = treat_ya_given_control_conditional(config, r);
    let t_second = treat_ya_given_control_conditional(config, q);
    let t_none = treat_ya_given_control_conditional(config, r);
    let treat = vec![
        Atom {
            ya: true,
            disc: DiscCategory::First,
            probability: pd1 * t_first,
        },
        Atom {
            ya: false,
            disc: DiscCategory::First,
            probability: pd1 * (1.0 - t_first),
        },
        Atom {
            ya: true,
            disc: DiscCategory::None,
            probability: p_none * t_none + pd2 * t_second,
        },
        Atom {
            ya: false,
            disc: DiscCategory::None,
            probability: p_none * (1.0 - t_none) + pd2 * (1.0 - t_second),
        },
    ];

    Ok(JointDistribution { treat, control })
}

/// Compute the closed-form summary: per-arm composite event probabilities,
/// the true risk difference, the expected excess-event count, and the
/// asymptotic rejection probability
/// `Phi(-z - rd/se) + Phi(-z + rd/se)` with
/// `se = sqrt(p_t(1-p_t)/(n/2) + p_c(1-p_c)/(n/2))`.
pub fn summarize_population(config: &ScenarioConfig) -> Result<OracleSummary, DgmError> {
    let joint = joint_distribution(config)?;

    // The composite is favourable only on the (ya = 0, disc = None) atom:
    // under the control arm any discontinuation fires the composite, under
    // the treated arm the late class has already been folded into None.
    let p_event_control = 1.0 - JointDistribution::mass(&joint.control, false, DiscCategory::None);
    let p_event_treat = 1.0 - JointDistribution::mass(&joint.treat, false, DiscCategory::None);
    let true_rd = p_event_treat - p_event_control;

    let per_arm = config.per_arm() as f64;
    let expected_excess =
        per_arm * JointDistribution::mass(&joint.control, false, DiscCategory::Second);

    let variance = p_event_treat * (1.0 - p_event_treat) / per_arm
        + p_event_control * (1.0 - p_event_control) / per_arm;
    let se = variance.sqrt();
    let asymptotic_rejection = if se == 0.0 {
        // Degenerate outcomes: the test statistic convention rejects exactly
        // when the (constant) estimate is non-zero.
        if true_rd == 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        let z = normal_quantile(1.0 - config.alpha / 2.0);
        let shift = true_rd / se;
        normal_cdf(-z - shift) + normal_cdf(-z + shift)
    };

    Ok(OracleSummary {
        p_event_treat,
        p_event_control,
        true_rd,
        expected_excess,
        asymptotic_rejection,
    })
}
