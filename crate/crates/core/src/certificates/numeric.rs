//! Floating-point checks of the continuous envelope. Nothing here feeds a
//! certificate verdict.

use rayon::prelude::*;
use serde::Serialize;

use crate::quadrature::{gamma_lower, l_alpha};
use crate::{Error, Result};

/// `t^α B_t(ρ, α)` against `max{L_α(θ), 1/2}` with `θ = -(t/2) ln(1 - 2ρ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeComparison {
    pub alpha: f64,
    pub t: u64,
    pub rho: f64,
    pub scaled_discrete: f64,
    pub envelope: f64,
    /// `envelope - scaled_discrete`; nonnegative when the reduction holds.
    pub margin: f64,
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let s = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

pub fn b_discrete_vs_envelope(alpha: f64, t: u64, rho: f64) -> Result<EnvelopeComparison> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::invalid(format!(
            "alpha must lie in [0, 1), got {alpha}"
        )));
    }
    if t == 0 {
        return Err(Error::invalid("t must be >= 1"));
    }
    if !(rho > 0.0 && rho <= 0.5) {
        return Err(Error::invalid(format!(
            "rho must lie in (0, 1/2], got {rho}"
        )));
    }
    let tf = t as f64;
    let (scaled_discrete, envelope) = if rho == 0.5 {
        // Only the i = t term survives: t^α · (1/2) · t^{-α}.
        (0.5, 0.5)
    } else {
        let log_q = (-2.0 * rho).ln_1p();
        let sum = compensated_sum(
            (1..=t).map(|i| (((t - i) as f64) * log_q).exp() * (i as f64).powf(-alpha)),
        );
        let theta = -0.5 * tf * log_q;
        (tf.powf(alpha) * rho * sum, l_alpha(alpha, theta)?.max(0.5))
    };
    Ok(EnvelopeComparison {
        alpha,
        t,
        rho,
        scaled_discrete,
        envelope,
        margin: envelope - scaled_discrete,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeSweep {
    pub alpha: f64,
    pub points: usize,
    pub worst: EnvelopeComparison,
}

impl EnvelopeSweep {
    pub fn min_margin(&self) -> f64 {
        self.worst.margin
    }
}

/// Evaluates the comparison on the grid `ts × rhos` and keeps the point of
/// smallest margin.
pub fn envelope_sweep(alpha: f64, ts: &[u64], rhos: &[f64]) -> Result<EnvelopeSweep> {
    if ts.is_empty() || rhos.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    let grid: Vec<(u64, f64)> = ts
        .iter()
        .flat_map(|&t| rhos.iter().map(move |&r| (t, r)))
        .collect();
    let results: Vec<EnvelopeComparison> = grid
        .par_iter()
        .map(|&(t, r)| b_discrete_vs_envelope(alpha, t, r))
        .collect::<Result<_>>()?;
    let worst = *results
        .iter()
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
        .expect("non-empty grid");
    Ok(EnvelopeSweep {
        alpha,
        points: results.len(),
        worst,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OdeResidual {
    pub max_abs: f64,
    pub argmax_theta: f64,
}

/// Largest `|L'(θ) - (1 - (2 - α/θ) L(θ))|` over `thetas`, with `L'` from a
/// central difference of step `h`.
pub fn ode_residual(alpha: f64, thetas: &[f64], h: f64) -> Result<OdeResidual> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("step h must be positive, got {h}")));
    }
    if thetas.is_empty() {
        return Err(Error::invalid("theta grid is empty"));
    }
    let mut best = OdeResidual {
        max_abs: 0.0,
        argmax_theta: thetas[0],
    };
    for &theta in thetas {
        if !(theta > 0.0 && theta <= 10.0) || theta - h <= 0.0 {
            return Err(Error::invalid(format!(
                "theta must lie in (h, 10], got {theta}"
            )));
        }
        let derivative = (l_alpha(alpha, theta + h)? - l_alpha(alpha, theta - h)?) / (2.0 * h);
        let rhs = 1.0 - (2.0 - alpha / theta) * l_alpha(alpha, theta)?;
        let r = (derivative - rhs).abs();
        if r > best.max_abs {
            best = OdeResidual {
                max_abs: r,
                argmax_theta: theta,
            };
        }
    }
    Ok(best)
}

pub fn gamma_lower_eval(alpha: f64, theta: f64, t: f64) -> Result<f64> {
    gamma_lower(alpha, theta, t)
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaMonotoneReport {
    pub values: Vec<(f64, f64)>,
    pub l_value: f64,
    pub monotone: bool,
    pub below_l: bool,
}

/// Evaluates `Γ_{α,t}(θ)` at `t = 2^k`, `k = 0..=max_exp`, and checks that the
/// values are nondecreasing and bounded by `L_α(θ)`.
pub fn gamma_monotone_check(alpha: f64, theta: f64, max_exp: u32) -> Result<GammaMonotoneReport> {
    let l_value = l_alpha(alpha, theta)?;
    let values = (0..=max_exp)
        .map(|k| {
            let t = 2f64.powi(k as i32);
            gamma_lower(alpha, theta, t).map(|g| (t, g))
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = values.windows(2).all(|w| w[1].1 >= w[0].1);
    let below_l = values.iter().all(|&(_, g)| g <= l_value);
    Ok(GammaMonotoneReport {
        values,
        l_value,
        monotone,
        below_l,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct T1Search {
    /// Smallest integer `t` found with `Γ_{α,t}(θ) >= 1`, if any below the cap.
    pub t1: Option<u64>,
    pub gamma_at_t1: Option<f64>,
    pub limit: f64,
}

/// Empirical threshold `t_1` beyond which `Γ_{α,t}(θ) >= 1`, by doubling and
/// integer bisection (valid because `Γ` is nondecreasing in `t`).
pub fn find_t1(alpha: f64, theta: f64, t_cap: u64) -> Result<T1Search> {
    let limit = l_alpha(alpha, theta)?;
    let at = |t: u64| gamma_lower(alpha, theta, t as f64);
    if t_cap == 0 {
        return Err(Error::invalid("t_cap must be >= 1"));
    }
    if at(1)? >= 1.0 {
        return Ok(T1Search {
            t1: Some(1),
            gamma_at_t1: Some(at(1)?),
            limit,
        });
    }
    let mut lo = 1u64;
    let mut hi = loop {
        let next = lo.saturating_mul(2).min(t_cap);
        if at(next)? >= 1.0 {
            break next;
        }
        if next == t_cap {
            return Ok(T1Search {
                t1: None,
                gamma_at_t1: None,
                limit,
            });
        }
        lo = next;
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if at(mid)? >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(T1Search {
        t1: Some(hi),
        gamma_at_t1: Some(at(hi)?),
        limit,
    })
}
