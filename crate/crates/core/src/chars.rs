//! Exact character tables, the determinant character, linear twists and
//! restriction data on hyperplane stabilizers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{CycNum, ExactError};
use crate::group::ReflectionGroup;

#[derive(Debug, Error)]
pub enum CharError {
    #[error("character table construction failed: {0}")]
    Construction(String),
    #[error("character is not linear")]
    NotLinear,
    #[error("restriction multiplicity is not a nonnegative integer: {0}")]
    NonIntegral(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// One value per conjugacy class, in class order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFunction {
    pub values: Vec<CycNum>,
}

impl ClassFunction {
    pub fn new(values: Vec<CycNum>) -> Self {
        ClassFunction { values }
    }

    pub fn trivial(g: &ReflectionGroup) -> Self {
        ClassFunction::new(vec![CycNum::one(); g.classes.len()])
    }

    /// Value at the identity.
    pub fn degree(&self) -> CycNum {
        self.values[0].clone()
    }

    pub fn degree_usize(&self) -> Option<usize> {
        self.values[0].as_i64().and_then(|d| usize::try_from(d).ok())
    }

    pub fn is_linear(&self) -> bool {
        self.values[0].is_one()
    }

    pub fn conj(&self) -> Self {
        ClassFunction::new(self.values.iter().map(CycNum::conj).collect())
    }

    pub fn product(&self, other: &ClassFunction) -> Self {
        ClassFunction::new(self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect())
    }

    pub fn sum(&self, other: &ClassFunction) -> Self {
        ClassFunction::new(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    /// `(1/|W|) Σ_w χ(w) conj(ψ(w))`.
    pub fn inner(&self, other: &ClassFunction, g: &ReflectionGroup) -> CycNum {
        let mut acc = CycNum::zero();
        for (c, (a, b)) in g.classes.iter().zip(self.values.iter().zip(&other.values)) {
            acc += &(&(a * &b.conj()) * &CycNum::from_int(c.size() as i64));
        }
        &acc * &CycNum::from_frac(1, g.order() as i64)
    }

    /// Value on an arbitrary element.
    pub fn at(&self, g: &ReflectionGroup, w: usize) -> &CycNum {
        &self.values[g.class_of[w]]
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterTable {
    pub rows: Vec<ClassFunction>,
    /// Prime used by the modular eigenvector method.
    pub prime: u64,
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.degree_usize().expect("positive integer degree")).collect()
    }

    pub fn find(&self, chi: &ClassFunction) -> Option<usize> {
        self.rows.iter().position(|r| r == chi)
    }

    pub fn trivial_index(&self) -> usize {
        self.rows
            .iter()
            .position(|r| r.values.iter().all(CycNum::is_one))
            .expect("trivial character present")
    }

    /// Exact row orthogonality.
    pub fn rows_orthonormal(&self, g: &ReflectionGroup) -> bool {
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in self.rows.iter().enumerate() {
                let ip = a.inner(b, g);
                let want = if i == j { CycNum::one() } else { CycNum::zero() };
                if ip != want {
                    return false;
                }
            }
        }
        true
    }

    /// Exact column orthogonality: `Σ_χ χ(g_a) conj χ(g_b) = δ_ab |C_W(g_a)|`.
    /// Shape, trivial row and both orthogonality relations; used to
    /// revalidate tables that were not computed in this process.
    pub fn is_valid_for(&self, g: &ReflectionGroup) -> bool {
        self.rows.len() == g.classes.len()
            && self.rows.iter().all(|r| r.values.len() == g.classes.len())
            && self.rows.iter().any(|r| r.values.iter().all(CycNum::is_one))
            && self.rows_orthonormal(g)
            && self.columns_orthogonal(g)
    }

    pub fn columns_orthogonal(&self, g: &ReflectionGroup) -> bool {
        let r = g.classes.len();
        for a in 0..r {
            for b in 0..r {
                let mut acc = CycNum::zero();
                for row in &self.rows {
                    acc += &(&row.values[a] * &row.values[b].conj());
                }
                let want = if a == b {
                    CycNum::from_int((g.order() / g.classes[a].size()) as i64)
                } else {
                    CycNum::zero()
                };
                if acc != want {
                    return false;
                }
            }
        }
        true
    }
}

pub fn det_character(g: &ReflectionGroup) -> ClassFunction {
    ClassFunction::new(g.classes.iter().map(|c| g.dets[c.representative].clone()).collect())
}

pub fn tensor_with_linear(tau: &ClassFunction, lambda: &ClassFunction) -> Result<ClassFunction, CharError> {
    if !lambda.is_linear() {
        return Err(CharError::NotLinear);
    }
    Ok(tau.product(lambda))
}

/// `n[c][j]`: multiplicity of `det^{-j}` in the restriction of τ to the
/// stabilizer of one hyperplane of orbit `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalData {
    pub n: Vec<Vec<usize>>,
}

impl LocalData {
    /// `Σ_C |C| Σ_j j·n_{C,j}`.
    pub fn weighted_sum(&self, g: &ReflectionGroup) -> usize {
        self.n
            .iter()
            .zip(&g.orbits)
            .map(|(row, o)| o.members.len() * row.iter().enumerate().map(|(j, &m)| j * m).sum::<usize>())
            .sum()
    }
}

pub fn local_data(tau: &ClassFunction, g: &ReflectionGroup) -> Result<LocalData, CharError> {
    let mut n = Vec::with_capacity(g.orbits.len());
    for o in &g.orbits {
        let h = &g.hyperplanes[o.members[0]];
        let e = o.order;
        let mut row = Vec::with_capacity(e);
        for j in 0..e {
            let mut acc = CycNum::zero();
            for &w in &h.stabilizer {
                acc += &(tau.at(g, w) * &g.dets[w].pow(j as i64)?);
            }
            let m = &acc * &CycNum::from_frac(1, e as i64);
            let v = m
                .as_i64()
                .filter(|&v| v >= 0)
                .ok_or_else(|| CharError::NonIntegral(m.to_string()))?;
            row.push(v as usize);
        }
        n.push(row);
    }
    Ok(LocalData { n })
}

// ---------------------------------------------------------------------------
// Burnside–Dixon over F_p

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Smallest prime `p ≡ 1 (mod e)` with `p > 2√order`.
fn choose_prime(e: u64, order: u64) -> u64 {
    let bound = 2.0 * (order as f64).sqrt();
    let mut p = e + 1;
    while !(is_prime(p) && (p as f64) > bound) {
        p += e;
    }
    p
}

/// An element of multiplicative order exactly `e` in F_p.
fn root_of_unity(e: u64, p: u64) -> u64 {
    let factors: Vec<u64> = (2..p).filter(|&q| (p - 1) % q == 0 && is_prime(q)).collect();
    let gen = (2..p)
        .find(|&a| factors.iter().all(|&q| pow_mod(a, (p - 1) / q, p) != 1))
        .expect("F_p has a generator");
    pow_mod(gen, (p - 1) / e, p)
}

/// Right kernel of an `r × s` matrix over F_p.
fn kernel_mod(mut m: Vec<Vec<u64>>, s: usize, p: u64) -> Vec<Vec<u64>> {
    let r = m.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..s {
        let Some(piv) = (row..r).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(row, piv);
        let inv = inv_mod(m[row][c], p);
        for x in m[row].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..r {
            if i != row && m[i][c] != 0 {
                let f = m[i][c];
                for k in 0..s {
                    m[i][k] = (m[i][k] + p - f * m[row][k] % p) % p;
                }
            }
        }
        pivots.push(c);
        row += 1;
        if row == r {
            break;
        }
    }
    (0..s)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![0u64; s];
            v[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[i][f]) % p;
            }
            v
        })
        .collect()
}

pub fn character_table(g: &ReflectionGroup) -> Result<CharacterTable, CharError> {
    let r = g.classes.len();
    let order = g.order() as u64;
    let e = g.exponent as u64;
    let p = choose_prime(e, order);
    let sizes: Vec<u64> = g.classes.iter().map(|c| c.size() as u64).collect();
    let inv_class = g.inverse_class();

    // a[j][i][k] = #{x ∈ C_j : x⁻¹ z_k ∈ C_i}
    let mut a = vec![vec![vec![0u64; r]; r]; r];
    for (j, cj) in g.classes.iter().enumerate() {
        for (k, ck) in g.classes.iter().enumerate() {
            for &x in &cj.members {
                let y = g.mul(g.inverse[x], ck.representative);
                a[j][g.class_of[y]][k] += 1;
            }
        }
    }

    // split F_p^r into common eigenlines of the class matrices
    let identity: Vec<Vec<u64>> = (0..r).map(|i| (0..r).map(|k| u64::from(i == k)).collect()).collect();
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![identity];
    for mj in &a {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for basis in spaces {
            if basis.len() == 1 {
                next.push(basis);
                continue;
            }
            // image of each basis vector under M_j
            let images: Vec<Vec<u64>> = basis
                .iter()
                .map(|v| (0..r).map(|i| (0..r).fold(0, |acc, k| (acc + mj[i][k] * v[k]) % p)).collect())
                .collect();
            let mut found = 0;
            for lambda in 0..p {
                let s = basis.len();
                let m: Vec<Vec<u64>> = (0..r)
                    .map(|i| (0..s).map(|c| (images[c][i] + p - lambda * basis[c][i] % p) % p).collect())
                    .collect();
                let ker = kernel_mod(m, s, p);
                if ker.is_empty() {
                    continue;
                }
                found += ker.len();
                let sub: Vec<Vec<u64>> = ker
                    .iter()
                    .map(|c| (0..r).map(|i| (0..s).fold(0, |acc, t| (acc + c[t] * basis[t][i]) % p)).collect())
                    .collect();
                next.push(sub);
                if found == s {
                    break;
                }
            }
            if found != basis.len() {
                return Err(CharError::Construction("class matrix not diagonalizable mod p".into()));
            }
        }
        spaces = next;
    }
    if spaces.iter().any(|s| s.len() != 1) {
        return Err(CharError::Construction("eigenspaces did not separate".into()));
    }

    let z = root_of_unity(e, p);
    let inv_e = inv_mod(e % p, p);
    let power_classes: Vec<Vec<usize>> = (0..e as usize).map(|l| g.power_class(l)).collect();
    let mut rows = Vec::with_capacity(r);
    for space in &spaces {
        let v = &space[0];
        if v[0] == 0 {
            return Err(CharError::Construction("eigenvector vanishes at the identity".into()));
        }
        let s0 = inv_mod(v[0], p);
        let omega: Vec<u64> = v.iter().map(|x| x * s0 % p).collect();
        let norm = (0..r).fold(0, |acc, i| (acc + omega[i] * omega[inv_class[i]] % p * inv_mod(sizes[i] % p, p)) % p);
        if norm == 0 {
            return Err(CharError::Construction("zero norm".into()));
        }
        let d2 = order % p * inv_mod(norm, p) % p;
        let d = (1..=((order as f64).sqrt() as u64 + 1))
            .find(|&d| d * d % p == d2)
            .ok_or_else(|| CharError::Construction("no degree".into()))?;
        let chi_mod: Vec<u64> = (0..r).map(|i| omega[i] * d % p * inv_mod(sizes[i] % p, p) % p).collect();
        let mut values = Vec::with_capacity(r);
        for i in 0..r {
            let mut value = CycNum::zero();
            for k in 0..e {
                let mut m = 0u64;
                for l in 0..e {
                    let zl = pow_mod(z, (e - (k * l) % e) % e, p);
                    m = (m + chi_mod[power_classes[l as usize][i]] * zl) % p;
                }
                m = m * inv_e % p;
                if m > d {
                    return Err(CharError::Construction(format!("eigenvalue multiplicity {m} exceeds degree {d}")));
                }
                if m > 0 {
                    value += &(&CycNum::zeta(e as u32, k as i64) * &CycNum::from_int(m as i64));
                }
            }
            values.push(value);
        }
        rows.push(ClassFunction::new(values));
    }

    sort_rows(&mut rows);
    let table = CharacterTable { rows, prime: p };
    if !table.rows_orthonormal(g) {
        return Err(CharError::Construction("rows are not orthonormal".into()));
    }
    Ok(table)
}

/// Degree ascending, then values descending lexicographically by
/// (re, im) under the standard embedding.
pub fn sort_rows(rows: &mut [ClassFunction]) {
    fn key(c: &ClassFunction) -> Vec<(i64, i64)> {
        c.values
            .iter()
            .map(|v| {
                let z = v.to_complex();
                ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64)
            })
            .collect()
    }
    rows.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka[0].cmp(&kb[0]).then_with(|| kb.cmp(&ka))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_group;

    fn build(s: &str) -> ReflectionGroup {
        build_group(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn table_degrees() {
        let s3 = build("S3");
        let t = character_table(&s3).unwrap();
        assert_eq!(t.degrees(), vec![1, 1, 2]);
        assert_eq!(t.trivial_index(), 0);
        let b2 = build("G(2,1,2)");
        assert_eq!(character_table(&b2).unwrap().degrees(), vec![1, 1, 1, 1, 2]);
    }

    #[test]
    fn cyclic_table() {
        let g = build("G(3,1,1)");
        let t = character_table(&g).unwrap();
        assert_eq!(t.len(), 3);
        // class of the generator ζ3 acting on the line
        let gen_class = g.class_of[g.generator_index(0)];
        let mut seen: Vec<CycNum> = t.rows.iter().map(|r| r.values[gen_class].clone()).collect();
        for k in 0..3 {
            let z = CycNum::zeta(3, k);
            let pos = seen.iter().position(|v| *v == z).expect("every power of ζ3 occurs");
            seen.remove(pos);
        }
        assert!(t.columns_orthogonal(&g));
    }

    #[test]
    fn det_character_examples() {
        let s3 = build("S3");
        let det = det_character(&s3);
        assert!(det.values[0].is_one());
        let refl_class = s3.class_of[s3.reflections[0]];
        assert_eq!(det.values[refl_class], CycNum::from_int(-1));
        let c3 = build("G(3,1,1)");
        assert_eq!(det_character(&c3).values[c3.class_of[c3.generator_index(0)]], CycNum::zeta(3, 1));
    }

    #[test]
    fn local_data_examples() {
        let s3 = build("S3");
        let t = character_table(&s3).unwrap();
        let standard = &t.rows[2];
        assert_eq!(local_data(standard, &s3).unwrap().n, vec![vec![1, 1]]);
        assert_eq!(local_data(&t.rows[0], &s3).unwrap().n, vec![vec![1, 0]]);

        let c3 = build("G(3,1,1)");
        let det_inv = det_character(&c3).conj();
        assert_eq!(local_data(&det_inv, &c3).unwrap().n, vec![vec![0, 1, 0]]);
    }

    #[test]
    fn tensor_examples() {
        let s3 = build("S3");
        let t = character_table(&s3).unwrap();
        let sign = det_character(&s3);
        assert_eq!(tensor_with_linear(&t.rows[2], &sign).unwrap(), t.rows[2]);
        assert_eq!(tensor_with_linear(&sign, &sign).unwrap(), t.rows[0]);
        assert_eq!(tensor_with_linear(&t.rows[2], &t.rows[0]).unwrap(), t.rows[2]);
        assert!(matches!(tensor_with_linear(&t.rows[0], &t.rows[2]), Err(CharError::NotLinear)));
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(choose_prime(6, 6), 7);
        let p = choose_prime(12, 48);
        assert_eq!(p % 12, 1);
        let z = root_of_unity(12, p);
        assert_eq!(pow_mod(z, 12, p), 1);
        assert!((1..12).all(|k| pow_mod(z, k, p) != 1));
    }
}
