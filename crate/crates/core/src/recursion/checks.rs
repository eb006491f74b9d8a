use super::{validate_spectrum, EigenRecursionState, RecursionTrace};
use crate::{Error, Result};

/// `C/(t+1)^α` for even `t`, `C/(t+2)^α` for odd `t`.
pub fn upper_envelope(t: usize, alpha: f64, c: f64) -> f64 {
    let shift = if t.is_multiple_of(2) { 1.0 } else { 2.0 };
    c / (t as f64 + shift).powf(alpha)
}

/// A step where `μ_t` exceeds the even/odd envelope.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub t: usize,
    pub mu: f64,
    pub envelope: f64,
}

#[derive(Clone, Debug)]
pub struct UpperHypothesisReport {
    pub alpha: f64,
    pub c: f64,
    pub steps: usize,
    pub violation_count: usize,
    /// The first violations, at most [`UpperHypothesisReport::KEPT`].
    pub violations: Vec<Violation>,
    /// Largest `μ_t / envelope(t)` and where it occurs.
    pub max_ratio: f64,
    pub argmax_ratio: usize,
}

impl UpperHypothesisReport {
    pub const KEPT: usize = 100;

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Runs the recursion for `steps` steps and flags every `t` with
/// `μ_t > upper_envelope(t, α, C)`.
pub fn check_upper_hypothesis(
    rho: &[f64],
    steps: usize,
    alpha: f64,
    c: f64,
) -> Result<UpperHypothesisReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("C must be positive, got {c}")));
    }
    let mut state = EigenRecursionState::new(rho.to_vec())?;
    let mut report = UpperHypothesisReport {
        alpha,
        c,
        steps,
        violation_count: 0,
        violations: Vec::new(),
        max_ratio: 0.0,
        argmax_ratio: 0,
    };
    for t in 0..=steps {
        if t > 0 {
            state.step();
        }
        let mu = state.mu();
        let envelope = upper_envelope(t, alpha, c);
        let ratio = mu / envelope;
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.argmax_ratio = t;
        }
        if mu > envelope {
            report.violation_count += 1;
            if report.violations.len() < UpperHypothesisReport::KEPT {
                report.violations.push(Violation { t, mu, envelope });
            }
        }
    }
    Ok(report)
}

/// `ρ_m = (1 - e^{-3/(2m)})/2` for `m = 1..=size`, all in `(0, 1/2)`.
pub fn lower_bound_family(size: usize) -> Result<Vec<f64>> {
    if size == 0 {
        return Err(Error::invalid("family size must be at least 1"));
    }
    Ok((1..=size)
        .map(|m| -(-1.5 / m as f64).exp_m1() / 2.0)
        .collect())
}

/// Behaviour of `μ_t (t+1)^{exponent}` over `[t_from, t_to]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizationReport {
    pub exponent: f64,
    pub t_from: usize,
    pub t_to: usize,
    pub value_at_start: f64,
    pub min_value: f64,
    pub argmin: usize,
    /// `min_value / value_at_start`.
    pub ratio: f64,
}

pub fn normalized_floor(
    mu: &[f64],
    exponent: f64,
    t_from: usize,
    t_to: usize,
) -> Result<StabilizationReport> {
    if t_from > t_to || t_to >= mu.len() {
        return Err(Error::InvalidWindow(format!(
            "[{t_from}, {t_to}] does not fit a trace of length {}",
            mu.len()
        )));
    }
    let scaled = |t: usize| mu[t] * (t as f64 + 1.0).powf(exponent);
    let value_at_start = scaled(t_from);
    let (argmin, min_value) =
        (t_from..=t_to)
            .map(|t| (t, scaled(t)))
            .fold((t_from, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            });
    Ok(StabilizationReport {
        exponent,
        t_from,
        t_to,
        value_at_start,
        min_value,
        argmin,
        ratio: min_value / value_at_start,
    })
}

/// Sign pattern of `λ_{k,t+1} - λ_{k,t}` for one coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct AlternationPattern {
    pub k: usize,
    pub rho: f64,
    /// One of `+`, `-`, `0` per step `t = 0..=t_max`.
    pub signs: String,
    /// Whether the coordinate shows the behaviour expected for its regime:
    /// strict alternation when `ρ > 1/2`; for `ρ < 1/2`, no two consecutive
    /// sign changes once `t >= 2`. Always `true` at `ρ = 1/2`.
    pub passed: bool,
}

/// Classifies every coordinate of a recorded trace over `t ∈ [0, t_max]`.
pub fn alternation_report(trace: &RecursionTrace, t_max: usize) -> Result<Vec<AlternationPattern>> {
    validate_spectrum(&trace.rho)?;
    let lambdas = trace
        .lambdas
        .as_ref()
        .ok_or_else(|| Error::invalid("trace was recorded without eigenvalues"))?;
    if lambdas.len() < t_max + 2 {
        return Err(Error::invalid(format!(
            "need {} recorded steps, have {}",
            t_max + 2,
            lambdas.len()
        )));
    }
    Ok(trace
        .rho
        .iter()
        .enumerate()
        .map(|(k, &rho)| {
            let signs: Vec<i8> = (0..=t_max)
                .map(|t| {
                    let d = lambdas[t + 1][k] - lambdas[t][k];
                    if d > 0.0 {
                        1
                    } else if d < 0.0 {
                        -1
                    } else {
                        0
                    }
                })
                .collect();
            let passed = if rho > 0.5 {
                signs
                    .windows(2)
                    .all(|w| i16::from(w[0]) * i16::from(w[1]) < 0)
            } else if rho < 0.5 {
                !signs[2.min(signs.len())..]
                    .windows(3)
                    .any(|w| w[0] != w[1] && w[1] != w[2])
            } else {
                true
            };
            AlternationPattern {
                k,
                rho,
                signs: signs
                    .iter()
                    .map(|s| match s {
                        1 => '+',
                        -1 => '-',
                        _ => '0',
                    })
                    .collect(),
                passed,
            }
        })
        .collect())
}
