use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::chain::{CertificateReport, Chain, Status, Witness};
use crate::rational::{exp_taylor_partial, factorial, integer, pow, ratio};
use crate::{Error, Result};

/// Exact two-sided bound on `L_α(θ)` from a truncated series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesBound {
    #[serde(serialize_with = "as_string")]
    pub alpha: BigRational,
    #[serde(serialize_with = "as_string")]
    pub theta: BigRational,
    pub order_n: usize,
    pub order_m: u32,
    #[serde(serialize_with = "as_string")]
    pub value_lower: BigRational,
    #[serde(serialize_with = "as_string")]
    pub value_upper: BigRational,
}

fn as_string<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn check_params(alpha: &BigRational, theta: &BigRational) -> Result<()> {
    if alpha.is_negative() || *alpha >= BigRational::one() {
        return Err(Error::invalid(format!(
            "alpha must lie in [0, 1), got {alpha}"
        )));
    }
    if theta.is_negative() {
        return Err(Error::invalid(format!("theta must be >= 0, got {theta}")));
    }
    Ok(())
}

/// `S_N(x) = Σ_{n=0}^{N} x^n / (n! (n + 1 - α))`.
fn partial_series(alpha: &BigRational, x: &BigRational, order: usize) -> BigRational {
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for n in 0..=order {
        if n > 0 {
            term = term * x / BigInt::from(n);
        }
        sum += &term / (integer(n as i64 + 1) - alpha);
    }
    sum
}

/// Rigorous upper bound on `L_α(θ) = θ e^{-x} Σ x^n/(n!(n+1-α))`, `x = 2θ`:
///
/// `θ / P_m(x) · [S_N(x) + 1/(N+2-α) · x^{N+1}/(N+1)! · 1/(1 - x/(N+2))]`.
///
/// `e^{-x} <= 1/P_m(x)` because every dropped Taylor term is positive, and the
/// tail uses `1/(n+1-α) <= 1/(N+2-α)` plus a geometric bound on the
/// exponential tail, valid when `x < N + 2`.
pub fn l_series_upper(
    alpha: &BigRational,
    theta: &BigRational,
    order_n: usize,
    order_m: u32,
) -> Result<BigRational> {
    check_params(alpha, theta)?;
    let x = theta * integer(2);
    let n2 = integer(order_n as i64 + 2);
    if x >= n2 {
        return Err(Error::InvalidTruncation {
            x: x.to_string(),
            order: order_n,
        });
    }
    let p = exp_taylor_partial(&x, order_m)?;
    let head = partial_series(alpha, &x, order_n);
    let exp_tail = pow(&x, order_n + 1)
        / BigRational::from_integer(factorial(order_n as u32 + 1))
        / (BigRational::one() - &x / &n2);
    let tail = exp_tail / (&n2 - alpha);
    Ok(theta / p * (head + tail))
}

/// Rigorous lower bound `θ · max(P_k(-x), 0) · S_N(x)` with `k` the odd
/// order in `{m, m+1}`: an odd-degree Taylor polynomial of `e^{-x}` leaves a
/// positive remainder, and the dropped series terms are positive.
pub fn l_series_lower(
    alpha: &BigRational,
    theta: &BigRational,
    order_n: usize,
    order_m: u32,
) -> Result<BigRational> {
    check_params(alpha, theta)?;
    let x = theta * integer(2);
    let k = if order_m % 2 == 1 {
        order_m
    } else {
        order_m + 1
    };
    let e_lower = exp_taylor_partial(&(-&x), k)?;
    if !e_lower.is_positive() {
        return Ok(BigRational::zero());
    }
    Ok(theta * e_lower * partial_series(alpha, &x, order_n))
}

pub fn l_series_bounds(
    alpha: &BigRational,
    theta: &BigRational,
    order_n: usize,
    order_m: u32,
) -> Result<SeriesBound> {
    Ok(SeriesBound {
        alpha: alpha.clone(),
        theta: theta.clone(),
        order_n,
        order_m,
        value_lower: l_series_lower(alpha, theta, order_n, order_m)?,
        value_upper: l_series_upper(alpha, theta, order_n, order_m)?,
    })
}

/// Truncation orders tried by [`one_point_check`], default first.
pub const ONE_POINT_ORDERS: [(usize, u32); 6] =
    [(4, 8), (6, 12), (8, 16), (12, 24), (16, 32), (24, 48)];

/// `θ_ℓ = α / (2 - 1/ℓ)`.
pub fn theta_ell(alpha: &BigRational, ell: &BigRational) -> Result<BigRational> {
    crate::rational::checked_div(
        alpha,
        &(integer(2) - crate::rational::checked_div(&integer(1), ell)?),
    )
}

/// One-point criterion: if `L_α(θ_ℓ) < ℓ` then `sup_θ L_α(θ) <= ℓ`.
///
/// Tries the default truncation `(N, m) = (4, 8)` and then larger orders.
/// When no order certifies the bound the report is
/// [`Status::Inconclusive`], never a claim that the bound is false.
pub fn one_point_check(alpha: &BigRational, ell: &BigRational) -> Result<CertificateReport> {
    if !alpha.is_positive() || *alpha >= BigRational::one() {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if *ell <= ratio(1, 2) || *ell >= BigRational::one() {
        return Err(Error::invalid(format!(
            "ell must lie in (1/2, 1), got {ell}"
        )));
    }
    let theta = theta_ell(alpha, ell)?;
    let x = &theta * integer(2);
    let claim = format!("sup_theta L_{alpha}(theta) <= {ell} via L_{alpha}(theta_ell) < {ell}");
    let mut best: Option<(usize, u32, BigRational)> = None;
    for (n, m) in ONE_POINT_ORDERS {
        if x >= integer(n as i64 + 2) {
            continue;
        }
        let upper = l_series_upper(alpha, &theta, n, m)?;
        if upper < *ell {
            let mut c = Chain::new();
            c.witness("alpha", alpha);
            c.witness("ell", ell);
            c.witness("theta_ell", &theta);
            c.witness(format!("upper bound Q_{n},{m}"), &upper);
            c.lt(
                format!("x = 2 theta_ell < N + 2 = {}", n + 2),
                &x,
                &integer(n as i64 + 2),
            );
            c.lt(format!("Q_{n},{m} < ell"), &upper, ell);
            return Ok(c.finish("one-point", claim));
        }
        if best.as_ref().is_none_or(|b| upper < b.2) {
            best = Some((n, m, upper));
        }
    }
    let mut witness = vec![
        Witness {
            label: "alpha".into(),
            value: alpha.to_string(),
        },
        Witness {
            label: "theta_ell".into(),
            value: theta.to_string(),
        },
    ];
    if let Some((n, m, u)) = &best {
        witness.push(Witness {
            label: format!("best upper bound Q_{n},{m}"),
            value: u.to_string(),
        });
    }
    Ok(CertificateReport {
        name: "one-point".into(),
        claim,
        verified: false,
        status: Status::Inconclusive,
        witness,
        steps: Vec::new(),
        failed_step: Some("series upper bound below ell".into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::l_alpha;
    use crate::rational::{approx_f64, parse_rational};

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn quartic_form_matches_reference_value() {
        let theta = q("1491/1976");
        let u = l_series_upper(&ratio(3, 4), &theta, 4, 8).unwrap();
        assert_eq!(
            u,
            q("1287675113562193776446577567744/1295590272667287121985809656211")
        );
    }

    #[test]
    fn truncation_condition() {
        assert!(matches!(
            l_series_upper(&ratio(3, 4), &integer(3), 4, 8),
            Err(Error::InvalidTruncation { order: 4, .. })
        ));
    }

    #[test]
    fn small_theta_bound() {
        let theta = ratio(1, 1_000_000);
        let u = l_series_upper(&ratio(3, 4), &theta, 4, 8).unwrap();
        assert!(u <= &theta / ratio(1, 4));
    }

    #[test]
    fn brackets_quadrature() {
        for alpha in [ratio(1, 2), ratio(3, 4), ratio(751, 1000), ratio(753, 1000)] {
            for k in 1..=20 {
                let theta = ratio(k, 8);
                let b = l_series_bounds(&alpha, &theta, 12, 24).unwrap();
                let l = l_alpha(approx_f64(&alpha), approx_f64(&theta)).unwrap();
                assert!(
                    approx_f64(&b.value_lower) <= l * (1.0 + 1e-12),
                    "{alpha} {theta}"
                );
                assert!(
                    l <= approx_f64(&b.value_upper) * (1.0 + 1e-12),
                    "{alpha} {theta}"
                );
            }
        }
    }

    #[test]
    fn upper_bound_tightens_with_order() {
        let alpha = ratio(751, 1000);
        let theta = ratio(374749, 498000);
        let mut prev = l_series_upper(&alpha, &theta, 2, 4).unwrap();
        for (n, m) in [(3, 6), (4, 8), (6, 12), (10, 20)] {
            let u = l_series_upper(&alpha, &theta, n, m).unwrap();
            assert!(u <= prev);
            prev = u;
        }
    }

    #[test]
    fn one_point_examples() {
        let r = one_point_check(&ratio(3, 4), &ratio(497, 500)).unwrap();
        assert!(r.verified);
        assert!(r.witness.iter().any(|w| w.value == "1491/1976"));
        let r = one_point_check(&ratio(751, 1000), &ratio(499, 500)).unwrap();
        assert!(r.verified);
        assert!(r.witness.iter().any(|w| w.value == "374749/498000"));
        let r = one_point_check(&ratio(3, 4), &ratio(3, 5)).unwrap();
        assert!(!r.verified);
        assert_eq!(r.status, Status::Inconclusive);
        assert!(one_point_check(&ratio(3, 4), &ratio(1, 2)).is_err());
        assert!(one_point_check(&integer(1), &ratio(3, 4)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn bounds_ordered_and_tighten(a in 1i64..999, th in 1i64..2000) {
                let alpha = ratio(a, 1000);
                let theta = ratio(th, 1000);
                let b4 = l_series_bounds(&alpha, &theta, 4, 8).unwrap();
                let b8 = l_series_bounds(&alpha, &theta, 8, 16).unwrap();
                prop_assert!(b4.value_lower <= b4.value_upper);
                prop_assert!(b8.value_upper <= b4.value_upper);
                prop_assert!(b8.value_lower <= b8.value_upper);
                prop_assert!(b4.value_upper >= b8.value_lower);
            }

            #[test]
            fn one_point_never_verifies_below_quadrature(a in 300i64..900, e in 510i64..999) {
                let alpha = ratio(a, 1000);
                let ell = ratio(e, 1000);
                let theta = theta_ell(&alpha, &ell).unwrap();
                let l = l_alpha(approx_f64(&alpha), approx_f64(&theta)).unwrap();
                let r = one_point_check(&alpha, &ell).unwrap();
                if r.verified {
                    prop_assert!(l < approx_f64(&ell));
                }
            }
        }
    }
}
