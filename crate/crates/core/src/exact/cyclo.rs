//! Elements of the cyclotomic field Q(ζ_N).
//!
//! An element is stored in the power basis `1, ζ, …, ζ^{φ(N)-1}` after
//! reduction modulo the N-th cyclotomic polynomial. Only nonzero
//! coefficients are kept, so two elements of the same conductor are equal
//! exactly when their term lists are equal.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock, RwLock};

use num::complex::Complex64;
use num::integer::Integer;
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{parse_rational, ExactError, Rational};

/// Reduction data for one conductor.
struct Basis {
    phi: usize,
    /// `reduce[e]` is ζ^e written in the power basis, for `0 <= e < N`.
    reduce: Vec<Vec<(usize, i64)>>,
}

fn basis_cache() -> &'static RwLock<HashMap<u32, Arc<Basis>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Basis>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cyclotomic_cache() -> &'static RwLock<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients (ascending) of the N-th cyclotomic polynomial, obtained by
/// dividing `X^N - 1` by every `Φ_d` with `d | N`, `d < N`.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    assert!(n >= 1, "conductor must be positive");
    if let Some(p) = cyclotomic_cache().read().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let den = cyclotomic_polynomial(d);
            num = divide_monic(&num, &den);
        }
    }
    let p = Arc::new(num);
    cyclotomic_cache().write().unwrap().insert(n, p.clone());
    p
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        q[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "cyclotomic division not exact");
    q
}

fn basis(n: u32) -> Arc<Basis> {
    if let Some(b) = basis_cache().read().unwrap().get(&n) {
        return b.clone();
    }
    let phi_poly = cyclotomic_polynomial(n);
    let phi = phi_poly.len() - 1;
    let mut reduce: Vec<Vec<(usize, i64)>> = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    for e in 0..n as usize {
        if e > 0 {
            // multiply by ζ and fold ζ^φ back with the monic relation
            let top = cur[phi - 1];
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..phi {
                    cur[i] -= top * phi_poly[i];
                }
            }
        }
        reduce.push(
            cur.iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i, c))
                .collect(),
        );
    }
    let b = Arc::new(Basis { phi, reduce });
    basis_cache().write().unwrap().insert(n, b.clone());
    b
}

/// Euler's totient, as the degree of the N-th cyclotomic polynomial.
pub fn totient(n: u32) -> usize {
    basis(n).phi
}

/// An exact element of Q(ζ_N).
#[derive(Clone, Debug)]
pub struct CycNum {
    n: u32,
    terms: Vec<(u32, Rational)>,
}

impl CycNum {
    pub fn zero() -> Self {
        CycNum { n: 1, terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        let terms = if r.is_zero() { Vec::new() } else { vec![(0, r)] };
        CycNum { n: 1, terms }
    }

    pub fn from_int(i: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(i)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// ζ_N^e for an arbitrary integer exponent.
    pub fn zeta(n: u32, e: i64) -> Self {
        assert!(n >= 1, "conductor must be positive");
        let mut raw = HashMap::new();
        raw.insert(e, Rational::one());
        Self::reduce(&raw, n).expect("n >= 1")
    }

    /// Reduce `Σ raw[e] ζ_N^e` to canonical form.
    pub fn reduce(raw: &HashMap<i64, Rational>, n: u32) -> Result<Self, ExactError> {
        if n == 0 {
            return Err(ExactError::ZeroConductor);
        }
        let mut dense = vec![Rational::zero(); n as usize];
        for (&e, c) in raw {
            let idx = e.rem_euclid(n as i64) as usize;
            dense[idx] += c;
        }
        Ok(Self::from_dense_mod_n(dense, n))
    }

    /// `dense[e]` is the coefficient of ζ_N^e for `0 <= e < N`.
    fn from_dense_mod_n(dense: Vec<Rational>, n: u32) -> Self {
        let b = basis(n);
        let mut acc = vec![Rational::zero(); b.phi];
        for (e, c) in dense.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if e < b.phi {
                acc[e] += c;
            } else {
                for &(i, k) in &b.reduce[e] {
                    acc[i] += &c * Rational::from_integer(BigInt::from(k));
                }
            }
        }
        CycNum {
            n,
            terms: acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as u32, c))
                .collect(),
        }
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &[(u32, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|(e, _)| *e == 0)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_integer().and_then(|i| i.to_i64())
    }

    /// Rewrite in Q(ζ_m); `m` must be a multiple of the current conductor.
    pub fn promote(&self, m: u32) -> Self {
        if m == self.n {
            return self.clone();
        }
        if self.is_rational() {
            return CycNum { n: m, terms: self.terms.clone() };
        }
        assert!(m % self.n == 0, "cannot promote Q(ζ_{}) into Q(ζ_{})", self.n, m);
        let f = (m / self.n) as usize;
        let mut dense = vec![Rational::zero(); m as usize];
        for (e, c) in &self.terms {
            dense[(*e as usize * f) % m as usize] += c;
        }
        Self::from_dense_mod_n(dense, m)
    }

    fn common(a: &Self, b: &Self) -> u32 {
        if a.n == b.n {
            a.n
        } else {
            a.n.lcm(&b.n)
        }
    }

    /// Complex conjugation ζ^e ↦ ζ^{N-e}.
    pub fn conj(&self) -> Self {
        if self.is_rational() {
            return self.clone();
        }
        let mut dense = vec![Rational::zero(); self.n as usize];
        for (e, c) in &self.terms {
            let idx = (self.n as usize - *e as usize) % self.n as usize;
            dense[idx] += c;
        }
        Self::from_dense_mod_n(dense, self.n)
    }

    /// Image under the Galois automorphism ζ_N ↦ ζ_N^a (`gcd(a, N) = 1`).
    pub fn galois(&self, a: i64) -> Self {
        let n = self.n as i64;
        let mut dense = vec![Rational::zero(); self.n as usize];
        for (e, c) in &self.terms {
            dense[((*e as i64) * a).rem_euclid(n) as usize] += c;
        }
        Self::from_dense_mod_n(dense, self.n)
    }

    /// Numerical embedding ζ_N ↦ exp(2πi/N). Never used for exact decisions.
    pub fn to_complex(&self) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let angle = 2.0 * std::f64::consts::PI * (*e as f64) / (self.n as f64);
            z += Complex64::from_polar(1.0, angle) * c.to_f64().unwrap_or(f64::NAN);
        }
        z
    }

    pub fn inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(CycNum { n: self.n, terms: vec![(0, r.recip())] });
        }
        // Solve (multiplication-by-self) y = 1 in the power basis.
        let phi = totient(self.n);
        let mut mat: Vec<Vec<Rational>> = vec![vec![Rational::zero(); phi + 1]; phi];
        for j in 0..phi {
            let col = self * &CycNum::zeta(self.n, j as i64);
            for (i, c) in col.terms {
                mat[i as usize][j] = c;
            }
        }
        mat[0][phi] = Rational::one();
        let sol = solve_dense(mat).ok_or(ExactError::DivisionByZero)?;
        Ok(CycNum {
            n: self.n,
            terms: sol
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as u32, c))
                .collect(),
        })
    }

    pub fn pow(&self, e: i64) -> Result<Self, ExactError> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = CycNum::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Bytes that identify the element at a fixed conductor; used for hashing
    /// matrices after every entry has been promoted to the same field.
    pub fn write_key(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&(self.terms.len() as u32).to_le_bytes());
        for (e, c) in &self.terms {
            out.extend_from_slice(&e.to_le_bytes());
            out.extend_from_slice(c.numer().to_signed_bytes_le().as_slice());
            out.push(0xfe);
            out.extend_from_slice(c.denom().to_signed_bytes_le().as_slice());
            out.push(0xff);
        }
    }
}

/// Gaussian elimination on an augmented `k × (k+1)` rational system.
fn solve_dense(mut m: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let k = m.len();
    for col in 0..k {
        let piv = (col..k).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for c in col..=k {
            m[col][c] = &m[col][c] * &inv;
        }
        for r in 0..k {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=k {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.terms == other.terms;
        }
        if self.is_rational() && other.is_rational() {
            return self.terms == other.terms;
        }
        let m = self.n.lcm(&other.n);
        self.promote(m).terms == other.promote(m).terms
    }
}

impl Eq for CycNum {}

impl Default for CycNum {
    fn default() -> Self {
        CycNum::zero()
    }
}

impl From<i64> for CycNum {
    fn from(i: i64) -> Self {
        CycNum::from_int(i)
    }
}

impl From<Rational> for CycNum {
    fn from(r: Rational) -> Self {
        CycNum::from_rational(r)
    }
}

impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        let n = CycNum::common(self, rhs);
        if self.n != n || rhs.n != n {
            return &self.promote(n) + &rhs.promote(n);
        }
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < rhs.terms.len() {
            match (self.terms.get(i), rhs.terms.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    let s = &a.1 + &b.1;
                    if !s.is_zero() {
                        out.push((a.0, s));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    out.push(a.clone());
                    i += 1;
                }
                (Some(a), None) => {
                    out.push(a.clone());
                    i += 1;
                }
                (_, Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        CycNum { n, terms: out }
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self + &(-rhs)
    }
}

impl<'a> Neg for &'a CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        let n = CycNum::common(self, rhs);
        if self.is_zero() || rhs.is_zero() {
            return CycNum { n, terms: Vec::new() };
        }
        if let Some(r) = self.as_rational() {
            let b = rhs.promote(n);
            return CycNum { n, terms: b.terms.into_iter().map(|(e, c)| (e, c * &r)).collect() };
        }
        if let Some(r) = rhs.as_rational() {
            let a = self.promote(n);
            return CycNum { n, terms: a.terms.into_iter().map(|(e, c)| (e, c * &r)).collect() };
        }
        let a = self.promote(n);
        let b = rhs.promote(n);
        let mut dense = vec![Rational::zero(); n as usize];
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                dense[((ea + eb) % n) as usize] += ca * cb;
            }
        }
        CycNum::from_dense_mod_n(dense, n)
    }
}

impl<'a> Div<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn div(self, rhs: &CycNum) -> CycNum {
        self * &rhs.inv().expect("division by zero in Q(ζ_N)")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: CycNum) -> CycNum {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: &CycNum) -> CycNum {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<CycNum> for &'a CycNum {
            type Output = CycNum;
            fn $m(self, rhs: CycNum) -> CycNum {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&CycNum> for CycNum {
    fn add_assign(&mut self, rhs: &CycNum) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&CycNum> for CycNum {
    fn sub_assign(&mut self, rhs: &CycNum) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&CycNum> for CycNum {
    fn mul_assign(&mut self, rhs: &CycNum) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            match e {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => write!(f, "z{}^{}", self.n, e)?,
                _ => write!(f, "{a}*z{}^{}", self.n, e)?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycJson {
    #[serde(rename = "N")]
    n: u32,
    terms: Vec<(u32, String)>,
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycJson {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (*e, format!("{}/{}", c.numer(), c.denom()))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = CycJson::deserialize(d)?;
        let mut raw = HashMap::new();
        for (e, c) in &j.terms {
            let r = parse_rational(c).map_err(D::Error::custom)?;
            *raw.entry(*e as i64).or_insert_with(Rational::zero) += r;
        }
        CycNum::reduce(&raw, j.n).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(pairs: &[(i64, i64)]) -> HashMap<i64, Rational> {
        pairs
            .iter()
            .map(|&(e, c)| (e, Rational::from_integer(BigInt::from(c))))
            .collect()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(totient(24), 8);
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(CycNum::reduce(&raw(&[(1, 1)]), 1).unwrap(), CycNum::one());
        assert!(CycNum::reduce(&raw(&[(0, 1), (1, 1), (2, 1)]), 3).unwrap().is_zero());
        assert_eq!(CycNum::reduce(&raw(&[(2, 1)]), 4).unwrap(), CycNum::from_int(-1));
        assert!(matches!(CycNum::reduce(&raw(&[(0, 1)]), 0), Err(ExactError::ZeroConductor)));
    }

    #[test]
    fn reduction_is_idempotent() {
        let x = CycNum::reduce(&raw(&[(7, 3), (-2, 5), (11, -1)]), 12).unwrap();
        let again: HashMap<i64, Rational> =
            x.terms().iter().map(|(e, c)| (*e as i64, c.clone())).collect();
        assert_eq!(CycNum::reduce(&again, 12).unwrap().terms(), x.terms());
    }

    #[test]
    fn zeta_power_wraps() {
        for n in 1..=24u32 {
            assert!(CycNum::zeta(n, n as i64).is_one(), "ζ_{n}^{n}");
            assert_eq!(CycNum::zeta(n, 1).conj(), CycNum::zeta(n, -1));
        }
    }

    #[test]
    fn mixed_conductors_promote() {
        let a = CycNum::zeta(3, 1);
        let b = CycNum::zeta(6, 2);
        assert_eq!(a, b);
        let i = CycNum::zeta(4, 1);
        let s = &a * &i;
        assert_eq!(s.conductor(), 12);
        assert_eq!(s, CycNum::zeta(12, 7));
    }

    #[test]
    fn json_round_trip() {
        let x = &CycNum::zeta(5, 2) * &CycNum::from_frac(-3, 7);
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.starts_with("{\"N\":5"));
        let y: CycNum = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
