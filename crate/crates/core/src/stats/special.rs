//! Special functions backing the in-house distribution code: log-gamma,
//! the regularized incomplete beta and gamma functions, and the standard
//! normal CDF and quantile.
//!
//! Everything here is deterministic scalar math with no external
//! dependencies, so the statistics layer gives identical results on every
//! platform the simulation runs on.

use super::StatError;

/// Iteration cap for the continued-fraction evaluations.
const MAX_ITER: usize = 300;
/// Convergence threshold for continued fractions and series.
const EPS: f64 = 1e-15;
/// Guard value that keeps Lentz denominators away from zero.
const FPMIN: f64 = 1e-300;

/// Lanczos coefficients (g = 7, n = 9), as published.
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for positive real arguments.
///
/// Lanczos approximation with reflection for `x < 0.5`; accurate to about
/// 1e-13 relative error over the range used here.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * x).sin().abs().ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut series = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// Continued-fraction evaluation (modified Lentz), switching to the
/// complement `1 - I_{1-x}(b, a)` when `x > (a+1)/(a+b+2)` so the fraction
/// is always evaluated in its fast-converging region. Absolute error is
/// well below 1e-12 over the parameter ranges exercised by the test suite.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64, StatError> {
    if a.is_nan() || b.is_nan() || a <= 0.0 || b <= 0.0 {
        return Err(StatError::Domain(
            "incomplete beta requires a > 0 and b > 0",
        ));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(StatError::Domain("incomplete beta requires x in [0, 1]"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        Ok(1.0 - beta_cf(b, a, 1.0 - x)?)
    } else {
        beta_cf(a, b, x)
    }
}

/// `I_x(a, b)` by Lentz continued fraction, valid for `x <= (a+1)/(a+b+2)`.
fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64, StatError> {
    let ln_front = a * x.ln() + b * (1.0 - x).ln() + ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
    let front = ln_front.exp() / a;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_ITER {
        let mf = m as f64;
        let m2 = 2.0 * mf;

        // Even step.
        let num = mf * (b - mf) * x / ((qam + m2) * (a + m2));
        d = 1.0 + num * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + num / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;

        // Odd step.
        let num = -(a + mf) * (qab + mf) * x / ((a + m2) * (qap + m2));
        d = 1.0 + num * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + num / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;

        if (delta - 1.0).abs() < EPS {
            return Ok(front * h);
        }
    }
    Err(StatError::NoConvergence(MAX_ITER))
}

/// CDF of Student's t distribution with `df` degrees of freedom.
///
/// For `t >= 0`, `T_df(t) = 1 - I_x(df/2, 1/2) / 2` with `x = df/(df + t^2)`;
/// negative arguments use the odd symmetry about zero.
pub fn student_t_cdf(t: f64, df: u64) -> Result<f64, StatError> {
    if df == 0 {
        return Err(StatError::NonPositiveDf);
    }
    if t.is_nan() {
        return Ok(f64::NAN);
    }
    let dff = df as f64;
    let x = dff / (dff + t * t);
    let ib = reg_inc_beta(dff / 2.0, 0.5, x)?;
    Ok(if t >= 0.0 { 1.0 - 0.5 * ib } else { 0.5 * ib })
}

/// Two-sided tail probability `2 (1 - T_df(|t|))` of Student's t.
///
/// Evaluated directly as `I_x(df/2, 1/2)` with `x = df/(df + t^2)`, which is
/// algebraically the same quantity without the cancellation near p = 0.
pub fn student_t_two_sided_p(t: f64, df: u64) -> Result<f64, StatError> {
    if df == 0 {
        return Err(StatError::NonPositiveDf);
    }
    if t.is_nan() {
        return Ok(f64::NAN);
    }
    let dff = df as f64;
    reg_inc_beta(dff / 2.0, 0.5, dff / (dff + t * t))
}

/// Regularized lower incomplete gamma function `P(a, x)`.
///
/// Series expansion for `x < a + 1`, continued fraction for the upper tail
/// otherwise.
fn reg_lower_gamma(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let ln_front = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // Series: P(a,x) = front * sum_{n>=0} x^n / (a (a+1) ... (a+n))
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        sum * ln_front.exp()
    } else {
        // Lentz continued fraction for Q(a,x); P = 1 - Q.
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        1.0 - ln_front.exp() * h
    }
}

/// Standard normal CDF via the regularized incomplete gamma function:
/// `Phi(x) = (1 + sgn(x) P(1/2, x^2/2)) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    let p = reg_lower_gamma(0.5, 0.5 * x * x);
    if x >= 0.0 {
        0.5 * (1.0 + p)
    } else {
        0.5 * (1.0 - p)
    }
}

/// Standard normal quantile (inverse CDF).
///
/// Acklam's rational approximation refined with one Halley step against
/// [`normal_cdf`], giving close to full double precision in (0, 1).
/// Returns the appropriate infinity at p = 0 and p = 1.
pub fn normal_quantile(p: f64) -> f64 {
    if p.is_nan() {
        return f64::NAN;
    }
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }

    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // One Halley refinement step. Skipped in the far tails where
    // exp(x^2/2) overflows; the rational estimate is already at the limit
    // of what the tail probability can resolve there.
    if x.abs() > 37.0 {
        return x;
    }
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}
