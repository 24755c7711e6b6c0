//! Estimation and inference primitives: the risk-difference estimator, the
//! pooled two-sample t-test, and Monte Carlo standard error formulas.
//!
//! The t-test p-value is computed through the in-house Student-t CDF, which
//! in turn rests on the regularized incomplete beta function, so no external
//! statistics library is involved anywhere in the inference path.

mod special;

pub use special::{ln_gamma, normal_cdf, normal_quantile, reg_inc_beta, student_t_cdf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from the statistics layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatError {
    #[error("{0} arm is empty")]
    EmptyArm(&'static str),
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("degrees of freedom must be positive")]
    NonPositiveDf,
    #[error("argument out of domain: {0}")]
    Domain(&'static str),
    #[error("continued fraction did not converge within {0} iterations")]
    NoConvergence(usize),
}

/// Outcome of a two-sample test on binary outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// Risk difference: mean(treat) - mean(control), in [-1, 1].
    pub estimate: f64,
    /// Standard error of the estimate under the pooled-variance model.
    pub se: f64,
    /// Test statistic estimate / se.
    pub t_stat: f64,
    /// Degrees of freedom, n_treat + n_control - 2.
    pub df: u64,
    /// Two-sided p-value.
    pub p_value: f64,
    /// Whether the null was rejected at the supplied significance level.
    pub rejected: bool,
}

fn arm_counts(values: &[bool]) -> (u64, u64) {
    let ones = values.iter().filter(|&&v| v).count() as u64;
    (ones, values.len() as u64)
}

/// Risk difference between two arms of binary outcomes:
/// `mean(y_treat) - mean(y_control)`.
pub fn risk_difference(y_treat: &[bool], y_control: &[bool]) -> Result<f64, StatError> {
    if y_treat.is_empty() {
        return Err(StatError::EmptyArm("treat"));
    }
    if y_control.is_empty() {
        return Err(StatError::EmptyArm("control"));
    }
    let (c1, n1) = arm_counts(y_treat);
    let (c0, n0) = arm_counts(y_control);
    Ok(c1 as f64 / n1 as f64 - c0 as f64 / n0 as f64)
}

/// Pooled-variance two-sample t-test for binary outcomes.
///
/// Pooled variance `s^2 = (SS_treat + SS_control) / (n1 + n0 - 2)` with
/// `se = sqrt(s^2 (1/n1 + 1/n0))`, `t = estimate / se`, and a two-sided
/// p-value from the Student-t CDF. Sums of squares use the exact binary
/// identity `SS = c (n - c) / n`.
///
/// Zero-variance data would leave `t` undefined; the convention is total:
/// a zero estimate gives `(t = 0, p = 1)`, a non-zero estimate `p = 0`.
pub fn pooled_t_test(
    y_treat: &[bool],
    y_control: &[bool],
    alpha: f64,
) -> Result<TestResult, StatError> {
    if y_treat.is_empty() {
        return Err(StatError::EmptyArm("treat"));
    }
    if y_control.is_empty() {
        return Err(StatError::EmptyArm("control"));
    }
    if y_treat.len() < 2 || y_control.len() < 2 {
        return Err(StatError::TooFewValues {
            needed: 2,
            got: y_treat.len().min(y_control.len()),
        });
    }

    let (c1, n1) = arm_counts(y_treat);
    let (c0, n0) = arm_counts(y_control);
    let (n1f, n0f) = (n1 as f64, n0 as f64);
    let estimate = c1 as f64 / n1f - c0 as f64 / n0f;
    let df = n1 + n0 - 2;

    let ss_treat = (c1 * (n1 - c1)) as f64 / n1f;
    let ss_control = (c0 * (n0 - c0)) as f64 / n0f;
    let pooled_var = (ss_treat + ss_control) / df as f64;
    let se = (pooled_var * (1.0 / n1f + 1.0 / n0f)).sqrt();

    let (t_stat, p_value) = if se == 0.0 {
        if estimate == 0.0 {
            (0.0, 1.0)
        } else {
            (estimate.signum() * f64::INFINITY, 0.0)
        }
    } else {
        let t = estimate / se;
        (t, special::student_t_two_sided_p(t, df)?)
    };

    Ok(TestResult {
        estimate,
        se,
        t_stat,
        df,
        p_value,
        rejected: p_value < alpha,
    })
}

/// Monte Carlo standard error of a mean: `sd(values) / sqrt(count)`.
pub fn mcse_mean(values: &[f64]) -> Result<f64, StatError> {
    if values.len() < 2 {
        return Err(StatError::TooFewValues {
            needed: 2,
            got: values.len(),
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    Ok((ss / (n - 1.0)).sqrt() / n.sqrt())
}

/// Monte Carlo standard error of an estimated proportion:
/// `sqrt(p_hat (1 - p_hat) / n_reps)`.
pub fn mcse_proportion(p_hat: f64, n_reps: u64) -> Result<f64, StatError> {
    if n_reps == 0 {
        return Err(StatError::TooFewValues { needed: 1, got: 0 });
    }
    if !(0.0..=1.0).contains(&p_hat) {
        return Err(StatError::Domain("proportion must lie in [0, 1]"));
    }
    Ok((p_hat * (1.0 - p_hat) / n_reps as f64).sqrt())
}
