//! Exact rational scalars.
//!
//! Every quantity in the engine is a [`Rat`]: arbitrary-precision, always in
//! lowest terms with a positive denominator, no floating point on any
//! computational path. Floats appear only in display helpers that are
//! explicitly marked approximate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Shorthand for a rational from an integer pair. Panics on zero denominator.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn is_integer(q: &Rat) -> bool {
    q.denom().is_one()
}

/// Parse `p`, `-p`, or `p/q` with `q > 0` after normalization.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatParseError::Empty);
    }
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| RatParseError::BadInteger(s.into()))?;
            Ok(Rat::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num
                .trim()
                .parse()
                .map_err(|_| RatParseError::BadInteger(num.into()))?;
            let d: BigInt = den
                .trim()
                .parse()
                .map_err(|_| RatParseError::BadInteger(den.into()))?;
            if d.is_zero() {
                return Err(RatParseError::ZeroDenominator(s.into()));
            }
            Ok(Rat::new(n, d))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("`{0}` is not an integer")]
    BadInteger(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// `p/q` or bare integer; the canonical text form used by every output format.
pub fn fmt_rat(q: &Rat) -> String {
    if is_integer(q) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Decimal rendering for `--approx` output. Display only.
pub fn approx_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Approximate square root for display of alpha = sqrt(alpha^2). Display only.
pub fn approx_sqrt(q: &Rat) -> f64 {
    let v = approx_f64(q);
    if v < 0.0 {
        f64::NAN
    } else {
        v.sqrt()
    }
}

/// Exact floor of a rational.
pub fn floor_int(q: &Rat) -> BigInt {
    q.floor().to_integer()
}

/// Exact ceiling of a rational.
pub fn ceil_int(q: &Rat) -> BigInt {
    q.ceil().to_integer()
}

/// Largest integer `n` with `n^2 <= q` (0 for negative input). Exact.
pub fn isqrt_floor(q: &Rat) -> BigInt {
    if q.is_negative() || q.is_zero() {
        return BigInt::zero();
    }
    // floor(sqrt(a/b)) = floor(sqrt(floor(a*b)/b^2)) computed on integers
    let scaled = q.numer() * q.denom();
    let root = scaled.sqrt();
    // floor(sqrt(a/b)) = floor(sqrt(a*b)/b)
    root / q.denom()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rat("9/16").unwrap(), rat(9, 16));
        assert_eq!(parse_rat("-7/8").unwrap(), rat(-7, 8));
        assert_eq!(parse_rat("4").unwrap(), rat_int(4));
        assert_eq!(parse_rat(" -11/32 ").unwrap(), rat(-11, 32));
        assert_eq!(parse_rat("6/-8").unwrap(), rat(-3, 4));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(fmt_rat(&rat(18, 32)), "9/16");
        assert_eq!(fmt_rat(&rat(-8, 2)), "-4");
        assert_eq!(fmt_rat(&rat_int(0)), "0");
    }

    #[test]
    fn isqrt_floor_exact_cases() {
        assert_eq!(isqrt_floor(&rat_int(16)), BigInt::from(4));
        assert_eq!(isqrt_floor(&rat(1, 4)), BigInt::zero());
        assert_eq!(isqrt_floor(&rat(81, 4)), BigInt::from(4));
        assert_eq!(isqrt_floor(&rat_int(-3)), BigInt::zero());
    }
}
