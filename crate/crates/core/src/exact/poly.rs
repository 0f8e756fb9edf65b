//! Univariate polynomials and truncated power series in `T` over Q(ζ_N).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, Signed};
use serde::{Deserialize, Serialize};

use super::{CycNum, ExactError};

/// A polynomial in `T`; trailing zero coefficients are always stripped, so
/// the zero polynomial has an empty coefficient list and no degree.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PolyT {
    coeffs: Vec<CycNum>,
}

impl PolyT {
    pub fn new(mut coeffs: Vec<CycNum>) -> Self {
        while coeffs.last().is_some_and(CycNum::is_zero) {
            coeffs.pop();
        }
        PolyT { coeffs }
    }

    pub fn zero() -> Self {
        PolyT { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        PolyT::constant(CycNum::one())
    }

    pub fn constant(c: CycNum) -> Self {
        PolyT::new(vec![c])
    }

    /// `c · T^k`.
    pub fn monomial(c: CycNum, k: usize) -> Self {
        let mut v = vec![CycNum::zero(); k + 1];
        v[k] = c;
        PolyT::new(v)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        PolyT::new(c.iter().map(|&x| CycNum::from_int(x)).collect())
    }

    /// `1 - T^d`.
    pub fn one_minus_t_pow(d: usize) -> Self {
        let mut v = vec![CycNum::zero(); d + 1];
        v[0] = CycNum::one();
        v[d] = &v[d] - &CycNum::one();
        PolyT::new(v)
    }

    pub fn coeffs(&self) -> &[CycNum] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> CycNum {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, t: &CycNum) -> CycNum {
        self.coeffs.iter().rev().fold(CycNum::zero(), |acc, c| &(&acc * t) + c)
    }

    pub fn scale(&self, c: &CycNum) -> Self {
        PolyT::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiply by `T^k` where `k` may be negative; `None` if a negative
    /// exponent would appear.
    pub fn shift(&self, k: i64) -> Option<Self> {
        if self.is_zero() {
            return Some(PolyT::zero());
        }
        if k >= 0 {
            let mut v = vec![CycNum::zero(); k as usize];
            v.extend(self.coeffs.iter().cloned());
            return Some(PolyT::new(v));
        }
        let drop = k.unsigned_abs() as usize;
        if self.valuation()? < drop {
            return None;
        }
        Some(PolyT::new(self.coeffs[drop..].to_vec()))
    }

    /// `T^m · P(T^{-1})`; `None` if `m < deg P`.
    pub fn reflect(&self, m: usize) -> Option<Self> {
        match self.degree() {
            None => Some(PolyT::zero()),
            Some(d) if d > m => None,
            Some(_) => {
                let mut v = vec![CycNum::zero(); m + 1];
                for (k, c) in self.coeffs.iter().enumerate() {
                    v[m - k] = c.clone();
                }
                Some(PolyT::new(v))
            }
        }
    }

    pub fn conj(&self) -> Self {
        PolyT::new(self.coeffs.iter().map(CycNum::conj).collect())
    }

    /// Exact quotient `self / den`; non-exact division is an error.
    pub fn divide_exact(&self, den: &PolyT) -> Result<PolyT, ExactError> {
        let dd = den.degree().ok_or(ExactError::DivisionByZero)?;
        let Some(nd) = self.degree() else {
            return Ok(PolyT::zero());
        };
        if nd < dd {
            return Err(ExactError::NotDivisible);
        }
        let lead_inv = den.coeffs[dd].inv()?;
        let mut rem = self.coeffs.clone();
        let mut q = vec![CycNum::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let c = &rem[i + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in den.coeffs.iter().enumerate() {
                rem[i + j] = &rem[i + j] - &(&c * d);
            }
            q[i] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(ExactError::NotDivisible);
        }
        Ok(PolyT::new(q))
    }

    /// Integer coefficients, when every coefficient is a rational integer.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(CycNum::as_integer).collect()
    }

    /// True when every coefficient is a nonnegative rational integer.
    pub fn has_nonneg_integer_coeffs(&self) -> bool {
        self.integer_coeffs()
            .is_some_and(|v| v.iter().all(|c| !c.is_negative()))
    }

    /// Exponent multiset `{p_j}` of a polynomial with nonnegative integer
    /// coefficients, each exponent repeated by its coefficient.
    pub fn exponents(&self) -> Option<Vec<usize>> {
        let ints = self.integer_coeffs()?;
        let mut out = Vec::new();
        for (k, c) in ints.iter().enumerate() {
            if c.is_negative() {
                return None;
            }
            let times: usize = num::ToPrimitive::to_usize(c)?;
            out.extend(std::iter::repeat(k).take(times));
        }
        Some(out)
    }

    pub fn to_series(&self, order: usize) -> SeriesT {
        SeriesT::new(self.coeffs.clone(), order)
    }
}

impl<'a> Add<&'a PolyT> for &'a PolyT {
    type Output = PolyT;
    fn add(self, rhs: &PolyT) -> PolyT {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyT::new((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a PolyT> for &'a PolyT {
    type Output = PolyT;
    fn sub(self, rhs: &PolyT) -> PolyT {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyT::new((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl<'a> Neg for &'a PolyT {
    type Output = PolyT;
    fn neg(self) -> PolyT {
        PolyT::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<'a> Mul<&'a PolyT> for &'a PolyT {
    type Output = PolyT;
    fn mul(self, rhs: &PolyT) -> PolyT {
        if self.is_zero() || rhs.is_zero() {
            return PolyT::zero();
        }
        let mut v = vec![CycNum::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = &v[i + j] + &(a * b);
            }
        }
        PolyT::new(v)
    }
}

impl fmt::Display for PolyT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let c_str = if c.is_one() && k > 0 { String::new() } else { format!("({c})") };
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c_str}T")?,
                _ => write!(f, "{c_str}T^{k}")?,
            }
        }
        Ok(())
    }
}

/// A power series in `T` known up to and including `T^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesT {
    coeffs: Vec<CycNum>,
    order: usize,
}

impl SeriesT {
    pub fn new(mut coeffs: Vec<CycNum>, order: usize) -> Self {
        coeffs.truncate(order + 1);
        coeffs.resize(order + 1, CycNum::zero());
        SeriesT { coeffs, order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize) -> CycNum {
        if k > self.order {
            panic!("coefficient T^{k} is beyond truncation order {}", self.order);
        }
        self.coeffs[k].clone()
    }

    pub fn coeffs(&self) -> &[CycNum] {
        &self.coeffs
    }

    /// Series inverse of `p` to the given order.
    pub fn inverse_of(p: &PolyT, order: usize) -> Result<SeriesT, ExactError> {
        let c0 = p.coeff(0);
        if c0.is_zero() {
            return Err(ExactError::ZeroConstantTerm);
        }
        let c0_inv = c0.inv()?;
        let mut out: Vec<CycNum> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = if k == 0 { CycNum::one() } else { CycNum::zero() };
            for j in 1..=k.min(p.degree().unwrap_or(0)) {
                let pj = &p.coeffs()[j];
                if !pj.is_zero() {
                    acc = &acc - &(pj * &out[k - j]);
                }
            }
            out.push(&acc * &c0_inv);
        }
        Ok(SeriesT { coeffs: out, order })
    }

    pub fn inverse(&self) -> Result<SeriesT, ExactError> {
        SeriesT::inverse_of(&PolyT::new(self.coeffs.clone()), self.order)
    }

    pub fn scale(&self, c: &CycNum) -> SeriesT {
        SeriesT { coeffs: self.coeffs.iter().map(|x| x * c).collect(), order: self.order }
    }

    pub fn mul_poly(&self, p: &PolyT) -> SeriesT {
        let mut v = vec![CycNum::zero(); self.order + 1];
        for (i, a) in p.coeffs().iter().enumerate().take(self.order + 1) {
            if a.is_zero() {
                continue;
            }
            for j in 0..=self.order - i {
                v[i + j] = &v[i + j] + &(a * &self.coeffs[j]);
            }
        }
        SeriesT { coeffs: v, order: self.order }
    }

    pub fn to_poly(&self) -> PolyT {
        PolyT::new(self.coeffs.clone())
    }
}

impl<'a> Add<&'a SeriesT> for &'a SeriesT {
    type Output = SeriesT;
    fn add(self, rhs: &SeriesT) -> SeriesT {
        let order = self.order.min(rhs.order);
        SeriesT {
            coeffs: (0..=order).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
            order,
        }
    }
}

impl<'a> Mul<&'a SeriesT> for &'a SeriesT {
    type Output = SeriesT;
    fn mul(self, rhs: &SeriesT) -> SeriesT {
        let order = self.order.min(rhs.order);
        SeriesT::new(self.coeffs.clone(), order).mul_poly(&PolyT::new(rhs.coeffs[..=order].to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> PolyT {
        PolyT::from_ints(c)
    }

    #[test]
    fn series_inverse_examples() {
        let s = SeriesT::inverse_of(&p(&[1, -1]), 3).unwrap();
        assert_eq!(s.to_poly(), p(&[1, 1, 1, 1]));
        let s = SeriesT::inverse_of(&PolyT::one(), 5).unwrap();
        assert_eq!(s.to_poly(), PolyT::one());
        // (1 - ζ3 T)(1 - ζ3^2 T) = 1 + T + T^2
        let z = CycNum::zeta(3, 1);
        let z2 = CycNum::zeta(3, 2);
        let f = &PolyT::new(vec![CycNum::one(), -&z]) * &PolyT::new(vec![CycNum::one(), -&z2]);
        assert_eq!(f, p(&[1, 1, 1]));
        let s = SeriesT::inverse_of(&f, 2).unwrap();
        assert_eq!(s.to_poly(), p(&[1, -1]));
        assert!(matches!(SeriesT::inverse_of(&p(&[0, 1]), 3), Err(ExactError::ZeroConstantTerm)));
    }

    #[test]
    fn exact_division_examples() {
        assert_eq!(p(&[1, 0, -1]).divide_exact(&p(&[1, -1])).unwrap(), p(&[1, 1]));
        assert!(matches!(
            p(&[1, 0, 0, -1]).divide_exact(&p(&[1, 0, -1])),
            Err(ExactError::NotDivisible)
        ));
        let num = &PolyT::one_minus_t_pow(2) * &PolyT::one_minus_t_pow(4);
        assert_eq!(num.divide_exact(&PolyT::one_minus_t_pow(2)).unwrap(), PolyT::one_minus_t_pow(4));
        assert!(matches!(p(&[1]).divide_exact(&PolyT::zero()), Err(ExactError::DivisionByZero)));
    }

    #[test]
    fn series_never_reports_beyond_order() {
        let s = SeriesT::inverse_of(&p(&[1, -1]), 2).unwrap();
        let r = std::panic::catch_unwind(|| s.coeff(3));
        assert!(r.is_err());
        assert_eq!(s.coeffs().len(), 3);
    }

    #[test]
    fn shift_and_reflect() {
        let f = p(&[0, 1, 1]);
        assert_eq!(f.shift(-1).unwrap(), p(&[1, 1]));
        assert!(f.shift(-2).is_none());
        assert_eq!(f.reflect(3).unwrap(), p(&[0, 1, 1]));
        assert_eq!(p(&[1]).reflect(3).unwrap(), p(&[0, 0, 0, 1]));
        assert_eq!(f.exponents().unwrap(), vec![1, 2]);
        assert!(PolyT::zero().degree().is_none());
    }
}
