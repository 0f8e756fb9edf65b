//! Exact arithmetic: rationals, cyclotomic numbers, univariate polynomials
//! and truncated series in `T`, multivariate polynomials on `V`, and dense
//! matrices over Q(ζ_N).

mod cyclo;
mod matrix;
mod multipoly;
mod poly;

pub use cyclo::{cyclotomic_polynomial, totient, CycNum};
pub use matrix::Matrix;
pub use multipoly::{Exponents, MultiPoly};
pub use poly::{PolyT, SeriesT};

use num::{BigInt, BigRational, Num, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("conductor must be at least 1")]
    ZeroConductor,
    #[error("division by zero")]
    DivisionByZero,
    #[error("series inverse needs a nonzero constant term")]
    ZeroConstantTerm,
    #[error("polynomial division is not exact")]
    NotDivisible,
    #[error("cannot parse rational '{0}'")]
    BadRational(String),
    #[error("polynomial is not homogeneous")]
    Inhomogeneous,
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
}

/// Parse `"p/q"`, `"p"` or a decimal such as `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let t = s.trim();
    let bad = || ExactError::BadRational(s.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str_radix(p.trim(), 10).map_err(|_| bad())?;
        let q = BigInt::from_str_radix(q.trim(), 10).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num = BigInt::from_str_radix(&digits, 10).map_err(|_| bad())?;
        let den = num::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    BigInt::from_str_radix(t, 10).map(Rational::from_integer).map_err(|_| bad())
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), rat(-4, 1));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
