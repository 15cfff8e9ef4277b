//! Exact rational scalars.
//!
//! Every quantity in the crate is a [`Rat`]: an arbitrary-precision fraction kept in
//! lowest terms with a positive denominator. There is no floating point anywhere.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {literal:?}: expected an integer or \"p/q\"")]
pub struct ParseRatError {
    pub literal: String,
}

/// Builds `num / den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Parses `"p/q"` or `"p"`. Decimal points, exponents and whitespace inside the
/// literal are rejected so that every accepted input denotes exactly one rational.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError { literal: s.to_string() };
    let valid_int = |t: &str| {
        let digits = t.strip_prefix('-').or_else(|| t.strip_prefix('+')).unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    if !valid_int(n) {
        return Err(err());
    }
    let num = BigInt::from_str(n).map_err(|_| err())?;
    let den = match d {
        Some(d) => {
            if !valid_int(d) {
                return Err(err());
            }
            BigInt::from_str(d).map_err(|_| err())?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rat::new(num, den))
}

/// Canonical text form: `"p/q"`, or `"p"` when the denominator is one.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn all_nonneg(v: &[Rat]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

pub fn min_rat<'a>(a: &'a Rat, b: &'a Rat) -> &'a Rat {
    if a <= b {
        a
    } else {
        b
    }
}

/// Positive and negative parts, `x = pos - neg` with both nonnegative.
pub fn split_sign(x: &Rat) -> (Rat, Rat) {
    if x.is_negative() {
        (Rat::zero(), -x.clone())
    } else {
        (x.clone(), Rat::zero())
    }
}
