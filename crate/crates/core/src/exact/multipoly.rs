//! Polynomials in the coordinates `x_1..x_n` of `V` with CycNum coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::complex::Complex64;

use super::{CycNum, ExactError, Matrix};

pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, CycNum>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: CycNum) -> Self {
        MultiPoly::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        MultiPoly::constant(nvars, CycNum::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        MultiPoly::monomial(nvars, e, CycNum::one())
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: CycNum) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        MultiPoly { nvars, terms }
    }

    /// `Σ a_i x_i`.
    pub fn linear_form(coeffs: &[CycNum]) -> Self {
        let n = coeffs.len();
        let mut p = MultiPoly::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &CycNum)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &[u32]) -> CycNum {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, e: Exponents, c: CycNum) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                *old += &c;
                if old.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<CycNum> {
        match self.terms.len() {
            0 => Some(CycNum::zero()),
            1 => self.terms.get(&vec![0; self.nvars]).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Common total degree of all terms; `Ok(None)` for the zero polynomial.
    pub fn homogeneous_degree(&self) -> Result<Option<u32>, ExactError> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let Some(d) = degs.next() else {
            return Ok(None);
        };
        if degs.all(|x| x == d) {
            Ok(Some(d))
        } else {
            Err(ExactError::Inhomogeneous)
        }
    }

    /// Lexicographically largest exponent with its coefficient.
    pub fn leading(&self) -> Option<(&Exponents, &CycNum)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &CycNum) -> Self {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = MultiPoly::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &[CycNum]) -> CycNum {
        assert_eq!(x.len(), self.nvars, "evaluation point dimension");
        let mut acc = CycNum::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = &t * xi;
                }
            }
            acc += &t;
        }
        acc
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(c.to_complex(), |t, (&k, xi)| t * xi.powu(k))
            })
            .sum()
    }

    /// `x ↦ f(A x)`, substituting `x_i ↦ Σ_j A_ij x_j`.
    pub fn substitute_linear(&self, a: &Matrix) -> Self {
        assert_eq!((a.nrows(), a.ncols()), (self.nvars, self.nvars), "substitution shape");
        let forms: Vec<MultiPoly> = (0..self.nvars).map(|i| MultiPoly::linear_form(&a.row(i))).collect();
        let mut powers: Vec<Vec<MultiPoly>> = forms.iter().map(|f| vec![MultiPoly::one(self.nvars), f.clone()]).collect();
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(self.nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &forms[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    t = &t * &powers[i][k as usize];
                }
            }
            out = &out + &t;
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * &CycNum::from_int(e[i] as i64));
        }
        out
    }

    /// Euler operator `Σ x_i ∂f/∂x_i`.
    pub fn euler(&self) -> Self {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let d: u32 = e.iter().sum();
            out.add_term(e.clone(), c * &CycNum::from_int(d as i64));
        }
        out
    }

    /// Exact quotient by `den`, by repeated cancellation of lex-leading terms.
    pub fn divide_exact(&self, den: &MultiPoly) -> Result<MultiPoly, ExactError> {
        let (le, lc) = den.leading().ok_or(ExactError::DivisionByZero)?;
        let le = le.clone();
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut q = MultiPoly::zero(self.nvars);
        while let Some((re, rc)) = rem.leading() {
            if re.iter().zip(&le).any(|(a, b)| a < b) {
                return Err(ExactError::NotDivisible);
            }
            let e: Exponents = re.iter().zip(&le).map(|(a, b)| a - b).collect();
            let t = MultiPoly::monomial(self.nvars, e, rc * &lc_inv);
            rem = &rem - &(&t * den);
            q = &q + &t;
        }
        Ok(q)
    }

    /// All exponent vectors of total degree `d` in `n` variables, in
    /// lexicographic order.
    pub fn monomials(n: usize, d: u32) -> Vec<Exponents> {
        fn rec(n: usize, d: u32, prefix: &mut Exponents, out: &mut Vec<Exponents>) {
            if prefix.len() + 1 == n {
                prefix.push(d);
                out.push(prefix.clone());
                prefix.pop();
                return;
            }
            for k in 0..=d {
                prefix.push(k);
                rec(n, d - k, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            if d == 0 {
                out.push(Vec::new());
            }
            return out;
        }
        rec(n, d, &mut Vec::new(), &mut out);
        out
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a> Neg for &'a MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&CycNum::from_int(-1))
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                .collect();
            if mono.is_empty() {
                write!(f, "({c})")?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "({c})*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(2, i)
    }

    #[test]
    fn division_and_homogeneity() {
        let f = &(&x(0) - &x(1)) * &(&x(0) + &x(1));
        assert_eq!(f.homogeneous_degree().unwrap(), Some(2));
        assert_eq!(f.divide_exact(&(&x(0) + &x(1))).unwrap(), &x(0) - &x(1));
        assert!(matches!(f.divide_exact(&x(0)), Err(ExactError::NotDivisible)));
        let g = &f + &MultiPoly::one(2);
        assert!(g.homogeneous_degree().is_err());
        assert_eq!(MultiPoly::zero(2).homogeneous_degree().unwrap(), None);
    }

    #[test]
    fn substitution_and_euler() {
        let swap = Matrix::from_ints(&[&[0, 1], &[1, 0]]);
        let f = &x(0) * &x(0);
        assert_eq!(f.substitute_linear(&swap), &x(1) * &x(1));
        let h = &f * &x(1);
        assert_eq!(h.euler(), h.scale(&CycNum::from_int(3)));
        assert_eq!(MultiPoly::monomials(3, 2).len(), 6);
        assert_eq!(MultiPoly::monomials(1, 4), vec![vec![4]]);
    }
}
