//! Exact rational helpers over [`num_rational::BigRational`].
//!
//! `BigRational` keeps every value in lowest terms with a positive
//! denominator, so the functions here only add parsing, guarded division and
//! the few series the certificates need.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Largest Taylor order accepted by [`exp_taylor_partial`].
pub const MAX_TAYLOR_ORDER: u32 = 64;

/// `n / d` from machine integers. Panics if `d == 0`; meant for constants.
pub fn ratio(n: i64, d: i64) -> BigRational {
    assert!(d != 0, "ratio with zero denominator");
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, an integer literal, or a finite decimal such as `"0.051"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let whole: BigInt = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            int_digits.parse().map_err(|_| bad())?
        };
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = BigRational::new(whole * &scale + frac_num, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// `a / b`, failing with [`Error::DivisionByZero`] instead of panicking.
pub fn checked_div(a: &BigRational, b: &BigRational) -> Result<BigRational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

/// Binary operations exposed by [`rat_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
    Cmp,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RatOutcome {
    Value(BigRational),
    Ordering(Ordering),
}

pub fn rat_arith(a: &BigRational, b: &BigRational, op: RatOp) -> Result<RatOutcome> {
    Ok(match op {
        RatOp::Add => RatOutcome::Value(a + b),
        RatOp::Sub => RatOutcome::Value(a - b),
        RatOp::Mul => RatOutcome::Value(a * b),
        RatOp::Div => RatOutcome::Value(checked_div(a, b)?),
        RatOp::Cmp => RatOutcome::Ordering(a.cmp(b)),
    })
}

/// `P_m(x) = Σ_{k=0}^{m} x^k / k!`, exactly.
pub fn exp_taylor_partial(x: &BigRational, m: u32) -> Result<BigRational> {
    if m > MAX_TAYLOR_ORDER {
        return Err(Error::invalid(format!(
            "Taylor order {m} exceeds the limit {MAX_TAYLOR_ORDER}"
        )));
    }
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for k in 1..=m {
        term = term * x / BigInt::from(k);
        sum += &term;
    }
    Ok(sum)
}

/// `true` iff `lhs > rhs`.
pub fn integer_inequality_check(lhs: &BigInt, rhs: &BigInt) -> bool {
    lhs > rhs
}

/// `x^n` for a nonnegative integer exponent.
pub fn pow(x: &BigRational, n: usize) -> BigRational {
    num_traits::pow(x.clone(), n)
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Nearest `f64`, for display only. Never used to decide a certificate.
pub fn approx_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}
