use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::chain::{CertificateReport, Chain};
use super::series::{l_series_lower, l_series_upper};
use crate::rational::{
    exp_taylor_partial, integer, integer_inequality_check, parse_rational, pow, ratio,
};
use crate::{Error, Result};

/// Exponent variant of the rate theorem: `α = 3/4` with `ℓ = 497/500`, or
/// `α = 751/1000` with `ℓ = 499/500`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Alpha34,
    Alpha751,
}

impl Variant {
    pub fn alpha(self) -> BigRational {
        match self {
            Variant::Alpha34 => ratio(3, 4),
            Variant::Alpha751 => ratio(751, 1000),
        }
    }

    pub fn ell(self) -> BigRational {
        match self {
            Variant::Alpha34 => ratio(497, 500),
            Variant::Alpha751 => ratio(499, 500),
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Variant::Alpha34 => "alpha34",
            Variant::Alpha751 => "alpha751",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.suffix())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha34" | "3/4" => Ok(Variant::Alpha34),
            "alpha751" | "751/1000" => Ok(Variant::Alpha751),
            other => Err(Error::invalid(format!("unknown variant '{other}'"))),
        }
    }
}

fn q(s: &str) -> BigRational {
    parse_rational(s).expect("hard-coded rational constant")
}

fn big(s: &str) -> BigInt {
    s.parse().expect("hard-coded integer constant")
}

/// Integer comparison `lhs > rhs`, recorded as a chain step.
fn int_gt(c: &mut Chain, label: &str, lhs: &BigInt, rhs: &BigInt) -> bool {
    let recorded = c.gt(
        label,
        &BigRational::from_integer(lhs.clone()),
        &BigRational::from_integer(rhs.clone()),
    );
    recorded && integer_inequality_check(lhs, rhs)
}

/// Maximiser and maximum of `A_t(ρ) = ρ (1 - 2ρ)^t` on `[0, 1/2]`:
/// `ρ* = 1/(2(t+1))`, `A_t(ρ*) = ρ* (t/(t+1))^t`.
pub fn a_envelope_max(t: u64) -> Result<(BigRational, BigRational)> {
    if t == 0 {
        return Err(Error::invalid("t must be >= 1"));
    }
    let t = i64::try_from(t).map_err(|_| Error::invalid("t too large"))?;
    let rho = ratio(1, 2 * (t + 1));
    let value = &rho * pow(&ratio(t, t + 1), t as usize);
    Ok((rho, value))
}

/// Exact check of the envelope maximiser on a rational grid for small `t`.
pub fn verify_a_envelope() -> CertificateReport {
    let mut c = Chain::new();
    let (rho1, v1) = a_envelope_max(1).expect("t = 1");
    let (rho2, v2) = a_envelope_max(2).expect("t = 2");
    c.eq("rho*_1 = 1/4", &rho1, &ratio(1, 4));
    c.eq("A_1(rho*) = 1/8", &v1, &ratio(1, 8));
    c.eq("rho*_2 = 1/6", &rho2, &ratio(1, 6));
    c.eq("A_2(rho*) = 2/27", &v2, &ratio(2, 27));
    for t in [1u64, 2, 10, 300] {
        let (rho_star, v) = a_envelope_max(t).expect("t >= 1");
        let worst = (1..=100)
            .map(|k| {
                let rho = ratio(k, 200);
                &rho * pow(&(BigRational::one() - &rho * integer(2)), t as usize)
            })
            .max()
            .expect("non-empty grid");
        c.le(
            format!("A_{t}(rho) <= A_{t}(rho*) on grid k/200"),
            &worst,
            &v,
        );
        c.witness(format!("rho*_{t}"), &rho_star);
    }
    c.finish(
        "a-envelope",
        "max_rho rho (1 - 2 rho)^t = (1/(2(t+1))) (t/(t+1))^t",
    )
}

/// Finite-time factor bound at `t = 300`, `α = 3/4`, against `target`.
pub fn verify_f300_with_target(target: &BigRational) -> CertificateReport {
    let mut c = Chain::new();
    let x = ratio(300, 301);
    let inv_p2 = BigRational::one() / (BigRational::one() + &x + &x * &x / integer(2));
    c.eq(
        "1/(1 + x + x^2/2) at x = 300/301",
        &inv_p2,
        &q("90601/225901"),
    );
    c.le(
        "(300/301)^300 <= 90601/225901",
        &pow(&ratio(300, 301), 300),
        &q("90601/225901"),
    );
    c.le("4^4 <= 301", &integer(256), &integer(301));
    let bern = BigRational::one() + ratio(3, 4 * 301);
    c.eq("1 + 3/(4*301)", &bern, &q("1207/1204"));
    let power_factor = ratio(1, 4) * &bern;
    c.eq("(1/4)(1207/1204)", &power_factor, &q("1207/4816"));
    c.le(
        "302^3 <= (301 * 1207/4816)^4",
        &pow(&integer(302), 3),
        &pow(&(integer(301) * &power_factor), 4),
    );
    let bound = ratio(1, 2) * &power_factor * q("90601/225901");
    c.eq("1207 * 90601", &integer(1207 * 90601), &integer(109355407));
    c.eq(
        "2 * 4816 * 225901",
        &integer(2 * 4816 * 225901),
        &integer(2175878432),
    );
    c.eq(
        "109355407 = 301 * 363307",
        &integer(109355407),
        &integer(301 * 363307),
    );
    c.eq(
        "2175878432 = 301 * 7228832",
        &integer(2175878432),
        &integer(301 * 7228832),
    );
    c.eq("f(300) bound", &bound, &q("363307/7228832"));
    c.witness("f300 upper bound", &bound);
    c.lt(format!("f300 bound < {target}"), &bound, target);
    c.finish("f300-alpha34", format!("f_3/4(300) < {target}"))
}

pub fn verify_f300() -> CertificateReport {
    verify_f300_with_target(&ratio(51, 1000))
}

/// One-point bound for `α = 3/4`: `L(θ_ℓ) <= Q_{4,8} < 497/500`.
pub fn verify_one_point_alpha34() -> CertificateReport {
    let mut c = Chain::new();
    let alpha = ratio(3, 4);
    let ell = ratio(497, 500);
    let theta = &alpha / (integer(2) - ratio(500, 497));
    c.eq(
        "theta_ell = (3/4)/(2 - 500/497)",
        &theta,
        &ratio(1491, 1976),
    );
    let x = &theta * integer(2);
    c.eq("x = 2 theta_ell", &x, &ratio(1491, 988));
    c.lt("x < N + 2 = 6", &x, &integer(6));
    let expected = q("1287675113562193776446577567744/1295590272667287121985809656211");
    match l_series_upper(&alpha, &theta, 4, 8) {
        Ok(upper) => {
            c.eq("Q_4,8 from the generic series bound", &upper, &expected);
            c.witness("Q_4,8", &upper);
        }
        Err(_) => {
            c.eq(
                "Q_4,8 from the generic series bound",
                &BigRational::from_integer(0.into()),
                &expected,
            );
        }
    }
    let gap = &ell - &expected;
    c.eq(
        "497/500 - Q_4,8",
        &gap,
        &q("70808734544811403658615264867/647795136333643560992904828105500"),
    );
    c.gt(
        "497/500 - Q_4,8 > 0",
        &gap,
        &BigRational::from_integer(0.into()),
    );
    c.witness("theta_ell", &theta);
    c.finish("one-point-alpha34", "sup_theta L_3/4(theta) <= 497/500")
}

/// One-point bound for `α = 751/1000`: `L(θ_ℓ) < 499/500` through the
/// weakened argument `x_+ = 753/500` with a geometric tail from `n = 4`.
pub fn verify_one_point_alpha751() -> CertificateReport {
    let mut c = Chain::new();
    let alpha = ratio(751, 1000);
    let theta = &alpha / (integer(2) - ratio(500, 499));
    c.eq(
        "theta_ell = (751/1000)/(2 - 500/499)",
        &theta,
        &ratio(374749, 498000),
    );
    let x = &theta * integer(2);
    c.eq("x = 2 theta_ell", &x, &ratio(374749, 249000));
    c.eq(
        "x = 301/200 + 1/62250",
        &x,
        &(ratio(301, 200) + ratio(1, 62250)),
    );
    let x_plus = ratio(753, 500);
    c.eq("753/500 - x", &(&x_plus - &x), &ratio(49, 49800));
    c.gt("x < x_+ = 753/500", &x_plus, &x);
    let theta_plus = ratio(753, 1000);
    c.eq("theta_+ = x_+/2", &theta_plus, &(&x_plus / integer(2)));

    let a: Vec<BigRational> = (0..6)
        .map(|n| {
            pow(&x_plus, n)
                / BigRational::from_integer(crate::rational::factorial(n as u32))
                / (integer(n as i64 + 1) - &alpha)
        })
        .collect();
    let expected_a = [
        "1000/249",
        "1506/1249",
        "567009/1124500",
        "15813251/90250000",
        "107166402027/2124500000000",
    ];
    for (n, e) in expected_a.iter().enumerate() {
        c.eq(format!("a_{n}"), &a[n], &q(e));
    }
    let r4 = &a[5] / &a[4];
    c.eq("r_4 = a_5/a_4", &r4, &ratio(3199497, 13122500));
    int_gt(
        &mut c,
        "13122500 > 4 * 3199497",
        &BigInt::from(13122500),
        &BigInt::from(4 * 3199497),
    );
    c.lt("r_4 < 1/4", &r4, &ratio(1, 4));
    let s = &a[0] + &a[1] + &a[2] + &a[3] + ratio(4, 3) * &a[4];
    c.eq(
        "S = a_0 + a_1 + a_2 + a_3 + (4/3) a_4",
        &s,
        &q("800429153543344037119501/134108154748420125000000"),
    );
    let p8 = exp_taylor_partial(&ratio(301, 200), 8).expect("order within limit");
    c.eq(
        "P_8(301/200)",
        &p8,
        &q("66414558043759180589143/14745600000000000000000"),
    );
    c.le("301/200 <= x", &ratio(301, 200), &x);
    let product = &theta_plus / &p8 * &s;
    let expected =
        q("23700038717989377538168622402764800000/23751290207147698032780270875855940541");
    c.eq("theta_+ / P_8 * S", &product, &expected);
    let lhs = BigInt::from(499) * expected.denom();
    let rhs = BigInt::from(500) * expected.numer();
    c.eq(
        "499 D - 500 N",
        &BigRational::from_integer(&lhs - &rhs),
        &BigRational::from_integer(big("1874454372012549273043965669714329959")),
    );
    int_gt(&mut c, "499 D > 500 N", &lhs, &rhs);
    c.witness("theta_ell", &theta);
    c.witness("upper bound", &product);
    c.finish(
        "one-point-alpha751",
        "sup_theta L_751/1000(theta) <= 499/500",
    )
}

/// Finite-time factor bound at `t = 300`, `α = 751/1000`.
pub fn verify_f300_alpha751() -> CertificateReport {
    let mut c = Chain::new();
    c.eq("(41/10)^4", &pow(&ratio(41, 10), 4), &ratio(2825761, 10000));
    c.lt("(41/10)^4 < 301", &ratio(2825761, 10000), &integer(301));
    c.gt(
        "(101/100)^100 > 2",
        &pow(&ratio(101, 100), 100),
        &integer(2),
    );
    c.gt("2^10 > 301", &integer(1024), &integer(301));
    c.gt(
        "(101/100)^1000 > 301",
        &pow(&ratio(101, 100), 1000),
        &integer(301),
    );
    c.gt(
        "301^249 > (410/101)^1000",
        &pow(&integer(301), 249),
        &pow(&ratio(410, 101), 1000),
    );
    let e_lower: BigRational = (0..=5)
        .map(|k| BigRational::new(1.into(), crate::rational::factorial(k)))
        .sum();
    c.eq("sum_{k<=5} 1/k!", &e_lower, &ratio(163, 60));
    c.lt(
        "(300/301)^301 < 60/163",
        &pow(&ratio(300, 301), 301),
        &ratio(60, 163),
    );
    let exp_factor = ratio(301, 300) * ratio(60, 163);
    c.eq("(301/300)(60/163)", &exp_factor, &ratio(301, 815));
    c.eq(
        "(10/41)(101/100)",
        &(ratio(10, 41) * ratio(101, 100)),
        &ratio(101, 410),
    );
    c.gt(
        "302^249 > (410/101)^1000",
        &pow(&integer(302), 249),
        &pow(&ratio(410, 101), 1000),
    );
    let bound = ratio(151, 301) * ratio(101, 410) * &exp_factor;
    c.eq("151/301 * 101/410 * 301/815", &bound, &ratio(15251, 334150));
    c.lt("f300 bound < 46/1000", &bound, &ratio(46, 1000));
    c.witness("f300 upper bound", &bound);
    c.finish("f300-alpha751", "f_751/1000(300) < 46/1000")
}

fn bsup_report(v: Variant, one_point: &CertificateReport) -> CertificateReport {
    let mut c = Chain::new();
    c.require(one_point);
    let alpha = v.alpha();
    let ell = v.ell();
    let (t0, factor_expected, product_expected, gap_expected) = match v {
        Variant::Alpha34 => (
            300,
            ratio(201, 200),
            ratio(99897, 100000),
            ratio(103, 100000),
        ),
        Variant::Alpha751 => (
            1000,
            ratio(500751, 500000),
            ratio(249874749, 250000000),
            ratio(125251, 250000000),
        ),
    };
    let factor = BigRational::one() + integer(2) * &alpha / integer(t0);
    c.eq(format!("1 + 2 alpha/{t0}"), &factor, &factor_expected);
    // (1 + 2/t0)^alpha <= 1 + 2 alpha/t0, checked by raising to the denominator of alpha.
    let p: usize = alpha.numer().try_into().expect("small numerator");
    let d: usize = alpha.denom().try_into().expect("small denominator");
    c.le(
        format!("(1 + 2/{t0})^{p} <= (1 + 2 alpha/{t0})^{d}"),
        &pow(&(BigRational::one() + ratio(2, t0)), p),
        &pow(&factor, d),
    );
    let product = &factor * &ell;
    c.eq("B_sup upper bound", &product, &product_expected);
    c.lt("B_sup < 1", &product, &BigRational::one());
    c.eq("1 - B_sup", &(BigRational::one() - &product), &gap_expected);
    c.witness("B_sup upper bound", &product);
    c.finish(
        &format!("bsup-{}", v.suffix()),
        format!("sup_t B_t <= {product_expected} < 1 for t >= {t0}"),
    )
}

pub fn verify_bsup(v: Variant) -> CertificateReport {
    match v {
        Variant::Alpha34 => bsup_report(v, &verify_one_point_alpha34()),
        Variant::Alpha751 => bsup_report(v, &verify_one_point_alpha751()),
    }
}

fn k_report(v: Variant, f300: &CertificateReport, bsup: &CertificateReport) -> CertificateReport {
    let mut c = Chain::new();
    c.require(f300);
    c.require(bsup);
    let (f_bound, gap, ratio_expected, k_cap, t0) = match v {
        Variant::Alpha34 => (
            ratio(51, 1000),
            ratio(103, 100000),
            ratio(5100, 103),
            50,
            300,
        ),
        Variant::Alpha751 => (
            ratio(15251, 334150),
            ratio(125251, 250000000),
            ratio(76255000000, 837052433),
            100,
            1000,
        ),
    };
    let k = &f_bound / &gap;
    c.eq("f bound / (1 - B_sup)", &k, &ratio_expected);
    if v == Variant::Alpha751 {
        int_gt(
            &mut c,
            "100 * 837052433 > 76255000000",
            &BigInt::from(83705243300_i64),
            &BigInt::from(76255000000_i64),
        );
    }
    c.lt(format!("K < {k_cap}"), &k, &integer(k_cap));
    c.lt(format!("{k_cap} < {t0}"), &integer(k_cap), &integer(t0));
    c.witness("K", &k);
    c.finish(
        &format!("k-{}", v.suffix()),
        format!("K = f/(1 - B_sup) < {k_cap} < {t0}"),
    )
}

/// The recursion constant requirement `K < t_0`, with its prerequisite
/// certificates rerun.
pub fn verify_k_requirement(v: Variant) -> CertificateReport {
    match v {
        Variant::Alpha34 => k_report(v, &verify_f300(), &verify_bsup(v)),
        Variant::Alpha751 => k_report(v, &verify_f300_alpha751(), &verify_bsup(v)),
    }
}

/// Lower-bound chain at `α_0 = 753/1000`, `θ_0 = 3/4`: `L_{α_0}(θ_0) > 1`.
pub fn verify_lower_bound_chain() -> CertificateReport {
    let mut c = Chain::new();
    let alpha = ratio(753, 1000);
    let theta = ratio(3, 4);
    let x = &theta * integer(2);
    let p9 = exp_taylor_partial(&(-&x), 9).expect("order within limit");
    c.eq("P_9(-3/2)", &p9, &ratio(511775, 2293760));
    c.eq("P_9(-3/2) reduced", &p9, &ratio(102355, 458752));
    let p10 = exp_taylor_partial(&(-&x), 10).expect("order within limit");
    c.eq("P_10(-3/2)", &p10, &ratio(10236229, 45875200));
    c.gt("P_10(-3/2) > P_9(-3/2)", &p10, &p9);

    let terms = [
        ratio(1000, 247),
        ratio(1500, 1247),
        ratio(375, 749),
        ratio(1125, 6494),
        ratio(3375, 67952),
        ratio(225, 18656),
    ];
    let lows = [
        ratio(2024, 500),
        ratio(601, 500),
        ratio(500, 999),
        ratio(433, 2500),
        ratio(149, 3000),
        ratio(301, 25000),
    ];
    let mut x_pow = BigRational::one();
    for (n, (term, low)) in terms.iter().zip(&lows).enumerate() {
        if n > 0 {
            x_pow = x_pow * &x / integer(n as i64);
        }
        let exact = &x_pow / (integer(n as i64 + 1) - &alpha);
        c.eq(format!("series term {n}"), &exact, term);
        let lhs = term.numer() * low.denom();
        let rhs = low.numer() * term.denom();
        int_gt(&mut c, &format!("term {n} > {low}"), &lhs, &rhs);
    }
    let sum: BigRational = lows.iter().sum();
    c.eq("sum of term lower bounds", &sum, &ratio(18685693, 3121875));
    int_gt(
        &mut c,
        "18685693 * 50 > 299 * 3121875",
        &BigInt::from(934284650_i64),
        &BigInt::from(933440625_i64),
    );
    c.gt("sum > 299/50", &sum, &ratio(299, 50));
    let product = &theta * &p9 * ratio(299, 50);
    c.eq(
        "(3/4) P_9(-3/2) (299/50)",
        &product,
        &ratio(91812435, 91750400),
    );
    c.gt("lower bound > 1", &product, &BigRational::one());
    match l_series_lower(&alpha, &theta, 5, 9) {
        Ok(generic) => {
            c.gt(
                "generic series lower bound (N, m) = (5, 9) > 1",
                &generic,
                &BigRational::one(),
            );
        }
        Err(_) => {
            c.gt(
                "generic series lower bound (N, m) = (5, 9) > 1",
                &BigRational::one(),
                &BigRational::one(),
            );
        }
    }
    c.witness("lower bound", &product);
    c.finish("lower-bound-alpha753", "L_753/1000(3/4) > 1")
}
