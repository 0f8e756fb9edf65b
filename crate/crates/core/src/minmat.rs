//! Explicit matrix realizations of irreducible characters and minimal
//! polynomial matrices of a given type.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::chars::{local_data, CharError, CharacterTable, ClassFunction};
use crate::exact::{CycNum, ExactError, Matrix, MultiPoly, PolyT, SeriesT};
use crate::fake::FakeDegree;
use crate::group::ReflectionGroup;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
const MIX_RETRIES: usize = 16;
const DET_POINTS: usize = 4;

#[derive(Debug, Error)]
pub enum MinmatError {
    #[error("no realization found for row {0}: {1}")]
    Realization(usize, String),
    #[error("equivariant space in degree {degree} has dimension {found}, expected {expected}")]
    Dimension { degree: usize, found: usize, expected: usize },
    #[error("determinant vanished after {0} mixing attempts")]
    Singular(usize),
    #[error("construction check failed: {0}")]
    Check(String),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Matrices of an irreducible representation on every group element.
#[derive(Clone, Debug)]
pub struct Realization {
    pub row: usize,
    pub dim: usize,
    pub generators: Vec<Matrix>,
    /// Hermitian form with `A^† G A = G` for every matrix `A`.
    pub gram: Matrix,
    pub elements: Vec<Matrix>,
}

impl Realization {
    fn from_generators(
        g: &ReflectionGroup,
        row: usize,
        generators: Vec<Matrix>,
        gram: Matrix,
        chi: &ClassFunction,
    ) -> Result<Self, MinmatError> {
        let dim = gram.nrows();
        let n = g.order();
        let mut elements: Vec<Option<Matrix>> = vec![None; n];
        elements[0] = Some(Matrix::identity(dim));
        for x in 0..n {
            let tx = elements[x].clone().expect("parents precede children");
            for (gi, gen) in generators.iter().enumerate() {
                let y = g.right_mul[x][gi];
                let ty = &tx * gen;
                match &elements[y] {
                    Some(existing) if *existing != ty => {
                        return Err(MinmatError::Realization(row, "relations violated".into()));
                    }
                    Some(_) => {}
                    None => elements[y] = Some(ty),
                }
            }
        }
        let elements: Vec<Matrix> = elements.into_iter().map(|m| m.expect("all reached")).collect();
        for (ci, c) in g.classes.iter().enumerate() {
            if elements[c.representative].trace() != chi.values[ci] {
                return Err(MinmatError::Realization(row, "character mismatch".into()));
            }
        }
        for a in &generators {
            if &(&a.conj_transpose() * &gram) * a != gram {
                return Err(MinmatError::Realization(row, "form not invariant".into()));
            }
        }
        Ok(Realization { row, dim, generators, gram, elements })
    }
}

/// Realize row `row` of the table: scalars for linear characters, the
/// defining matrices when the character is that of `V`, otherwise a minimal
/// left ideal of the group algebra.
pub fn matrix_realization(g: &ReflectionGroup, table: &CharacterTable, row: usize) -> Result<Realization, MinmatError> {
    let chi = &table.rows[row];
    if chi.is_linear() {
        let gens: Vec<Matrix> = (0..g.num_generators())
            .map(|gi| Matrix::diag(&[chi.at(g, g.generator_index(gi)).clone()]))
            .collect();
        return Realization::from_generators(g, row, gens, Matrix::identity(1), chi);
    }
    let natural: Vec<CycNum> = g.classes.iter().map(|c| g.elements[c.representative].trace()).collect();
    if natural == chi.values {
        return Realization::from_generators(g, row, g.generators.clone(), g.gram.clone(), chi);
    }
    left_ideal_realization(g, row, chi)
}

fn left_ideal_realization(g: &ReflectionGroup, row: usize, chi: &ClassFunction) -> Result<Realization, MinmatError> {
    let n = g.order();
    let d = chi.degree_usize().ok_or_else(|| MinmatError::Realization(row, "degree".into()))?;
    let (h, lambda_exp, o) = choose_eigenline(g, chi).ok_or_else(|| {
        MinmatError::Realization(row, "no element has a simple eigenvalue".into())
    })?;
    // central idempotent, up to the scalar d/|W|
    let e_chi: Vec<CycNum> = (0..n).map(|x| chi.at(g, g.inverse[x]).clone()).collect();
    // projector onto the λ-eigenline of h: Σ_l λ^{-l} h^l
    let mut powers = Vec::with_capacity(o);
    let mut x = 0;
    for _ in 0..o {
        powers.push(x);
        x = g.mul(x, h);
    }
    let mut f = vec![CycNum::zero(); n];
    for (l, &hl) in powers.iter().enumerate() {
        let coef = CycNum::zeta(o as u32, -((lambda_exp * l) as i64));
        let hl_inv = g.inverse[hl];
        for z in 0..n {
            let a = &e_chi[g.mul(z, hl_inv)];
            if !a.is_zero() {
                f[z] += &(a * &coef);
            }
        }
    }
    // (x f)_y = f_{x⁻¹ y}
    let translate = |x: usize, v: &[CycNum]| -> Vec<CycNum> {
        let xi = g.inverse[x];
        (0..n).map(|y| v[g.mul(xi, y)].clone()).collect()
    };
    let mut basis: Vec<Vec<CycNum>> = Vec::new();
    for x in 0..n {
        if basis.len() == d {
            break;
        }
        let cand = translate(x, &f);
        let mut trial = basis.clone();
        trial.push(cand);
        if Matrix::from_rows(trial.clone())?.rank() == trial.len() {
            basis = trial;
        }
    }
    if basis.len() != d {
        return Err(MinmatError::Realization(row, format!("left ideal has dimension {}", basis.len())));
    }
    let bmat = Matrix::from_cols(&basis)?;
    let mut gens = Vec::with_capacity(g.num_generators());
    for gi in 0..g.num_generators() {
        let gx = g.generator_index(gi);
        let cols: Vec<Vec<CycNum>> = basis
            .iter()
            .map(|b| {
                bmat.solve(&translate(gx, b))
                    .ok_or_else(|| MinmatError::Realization(row, "ideal not stable".into()))
            })
            .collect::<Result<_, _>>()?;
        gens.push(Matrix::from_cols(&cols)?);
    }
    let gram = &bmat.conj_transpose() * &bmat;
    Realization::from_generators(g, row, gens, gram, chi)
}

/// A class representative `h` of order `o` and an exponent `k` such that
/// `ζ_o^k` is a simple eigenvalue of τ(h); rational eigenvalues first.
fn choose_eigenline(g: &ReflectionGroup, chi: &ClassFunction) -> Option<(usize, usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for c in &g.classes {
        let h = c.representative;
        let o = g.orders[h];
        let mut x = 0;
        let mut vals = Vec::with_capacity(o);
        for _ in 0..o {
            vals.push(chi.at(g, x).clone());
            x = g.mul(x, h);
        }
        for k in 0..o {
            let mut m = CycNum::zero();
            for (l, v) in vals.iter().enumerate() {
                m += &(v * &CycNum::zeta(o as u32, -((k * l) as i64)));
            }
            if m != CycNum::from_int(o as i64) {
                continue;
            }
            let rational = 2 * k % o == 0;
            if rational {
                return Some((h, k, o));
            }
            best.get_or_insert((h, k, o));
        }
    }
    best
}

/// Action of `f ↦ f ∘ A` on the degree-`p` monomial basis: column `m` holds
/// the coefficients of `m ∘ A`.
fn monomial_action(a: &Matrix, monos: &[Vec<u32>], nvars: usize) -> Matrix {
    let index: std::collections::HashMap<&Vec<u32>, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut out = Matrix::zeros(monos.len(), monos.len());
    for (j, m) in monos.iter().enumerate() {
        let img = MultiPoly::monomial(nvars, m.clone(), CycNum::one()).substitute_linear(a);
        for (e, c) in img.terms() {
            out[(index[e], j)] = c.clone();
        }
    }
    out
}

/// Dimension of degree-`p` equivariant maps predicted by the fake degree:
/// `Σ_k [T^{p-k}] F_τ · [T^k] Π 1/(1 - T^{d_i})`.
pub fn expected_dimension(g: &ReflectionGroup, fake: &PolyT, p: usize) -> usize {
    let prod = g.degrees.iter().fold(PolyT::one(), |acc, &d| &acc * &PolyT::one_minus_t_pow(d));
    let inv = SeriesT::inverse_of(&prod, p).expect("constant term 1");
    (0..=p)
        .map(|k| {
            let a = fake.coeff(p - k).as_i64().unwrap_or(0);
            let b = inv.coeff(k).as_i64().unwrap_or(0);
            (a * b) as usize
        })
        .sum()
}

/// A vector-valued polynomial map `V → E`.
pub type PolyVec = Vec<MultiPoly>;

/// Basis of homogeneous degree-`p` maps `f` whose components transform as a
/// basis of τ: `f ∘ w⁻¹ = τ(w)^T f`.
pub fn equivariant_basis(g: &ReflectionGroup, real: &Realization, p: usize) -> Result<Vec<PolyVec>, MinmatError> {
    let nv = g.dim;
    let l = real.dim;
    let monos = MultiPoly::monomials(nv, p as u32);
    let nm = monos.len();
    let unknowns = l * nm;
    let mut rows: Vec<Vec<CycNum>> = Vec::new();
    for (gi, gen) in g.generators.iter().enumerate() {
        let a = monomial_action(&gen.inverse()?, &monos, nv);
        let t = &real.generators[gi];
        for i in 0..l {
            for mp in 0..nm {
                let mut eq = vec![CycNum::zero(); unknowns];
                for m in 0..nm {
                    eq[i * nm + m] += &a[(mp, m)];
                }
                for k in 0..l {
                    eq[k * nm + mp] -= &t[(k, i)];
                }
                if eq.iter().any(|x| !x.is_zero()) {
                    rows.push(eq);
                }
            }
        }
    }
    let kernel = if rows.is_empty() {
        (0..unknowns)
            .map(|u| (0..unknowns).map(|v| if u == v { CycNum::one() } else { CycNum::zero() }).collect())
            .collect()
    } else {
        Matrix::from_rows(rows)?.nullspace()
    };
    Ok(kernel
        .into_iter()
        .map(|v| {
            (0..l)
                .map(|i| {
                    let mut f = MultiPoly::zero(nv);
                    for (m, mono) in monos.iter().enumerate() {
                        f.add_term(mono.clone(), v[i * nm + m].clone());
                    }
                    f
                })
                .collect()
        })
        .collect())
}

/// Equivariant basis with its dimension checked against the fake degree.
pub fn checked_equivariant_basis(
    g: &ReflectionGroup,
    real: &Realization,
    fake: &PolyT,
    p: usize,
) -> Result<Vec<PolyVec>, MinmatError> {
    let basis = equivariant_basis(g, real, p)?;
    let expected = expected_dimension(g, fake, p);
    if basis.len() != expected {
        return Err(MinmatError::Dimension { degree: p, found: basis.len(), expected });
    }
    Ok(basis)
}

#[derive(Clone, Debug)]
pub struct MinimalMatrix {
    pub realization: Realization,
    /// `entries[i][j]`; column `j` is homogeneous of degree `column_degrees[j]`.
    pub entries: Vec<Vec<MultiPoly>>,
    pub column_degrees: Vec<usize>,
    pub det: MultiPoly,
}

impl MinimalMatrix {
    pub fn column(&self, j: usize) -> PolyVec {
        self.entries.iter().map(|r| r[j].clone()).collect()
    }

    pub fn euler_trace(&self) -> usize {
        self.column_degrees.iter().sum()
    }
}

fn random_small(rng: &mut ChaCha8Rng) -> CycNum {
    let mut k = 0;
    while k == 0 {
        k = rng.gen_range(-4i64..=4);
    }
    CycNum::from_int(k)
}

fn combine(basis: &[PolyVec], coeffs: &[CycNum]) -> PolyVec {
    let l = basis[0].len();
    (0..l)
        .map(|i| {
            basis
                .iter()
                .zip(coeffs)
                .fold(MultiPoly::zero(basis[0][i].nvars()), |acc, (b, c)| &acc + &b[i].scale(c))
        })
        .collect()
}

/// Determinant of a square polynomial matrix by cofactor expansion.
pub fn poly_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    let nv = m[0][0].nvars();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MultiPoly::zero(nv);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let t = &m[0][j] * &poly_det(&minor);
        acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}

/// Transpose of the cofactor matrix.
pub fn poly_adjugate(m: &[Vec<MultiPoly>]) -> Vec<Vec<MultiPoly>> {
    let n = m.len();
    let nv = m[0][0].nvars();
    if n == 1 {
        return vec![vec![MultiPoly::one(nv)]];
    }
    let mut adj = vec![vec![MultiPoly::zero(nv); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<MultiPoly>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, r)| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let d = poly_det(&minor);
            adj[j][i] = if (i + j) % 2 == 0 { d } else { -&d };
        }
    }
    adj
}

fn eval_matrix(m: &[Vec<MultiPoly>], x: &[CycNum]) -> Result<Matrix, ExactError> {
    Matrix::from_rows(m.iter().map(|r| r.iter().map(|f| f.eval(x)).collect()).collect())
}

pub fn build_minimal_matrix(
    g: &ReflectionGroup,
    table: &CharacterTable,
    row: usize,
    fake: &FakeDegree,
    seed: u64,
) -> Result<MinimalMatrix, MinmatError> {
    let real = matrix_realization(g, table, row)?;
    let l = real.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (row as u64).wrapping_mul(0x9e37_79b9));
    let mut groups: Vec<(usize, usize, Vec<PolyVec>)> = Vec::new();
    let mut p_prev = None;
    for &p in &fake.exponents {
        if p_prev == Some(p) {
            groups.last_mut().expect("group").1 += 1;
            continue;
        }
        p_prev = Some(p);
        let basis = checked_equivariant_basis(g, &real, &fake.polynomial, p)?;
        groups.push((p, 1, basis));
    }
    for _attempt in 0..MIX_RETRIES {
        let mut columns: Vec<PolyVec> = Vec::with_capacity(l);
        let mut degrees = Vec::with_capacity(l);
        for (p, mult, basis) in &groups {
            for _ in 0..*mult {
                let coeffs: Vec<CycNum> = (0..basis.len()).map(|_| random_small(&mut rng)).collect();
                columns.push(combine(basis, &coeffs));
                degrees.push(*p);
            }
        }
        let entries: Vec<Vec<MultiPoly>> = (0..l).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
        let mut nonzero = false;
        for _ in 0..DET_POINTS {
            let x: Vec<CycNum> = (0..g.dim).map(|_| CycNum::from_int(rng.gen_range(-9i64..=9))).collect();
            if !eval_matrix(&entries, &x)?.det()?.is_zero() {
                nonzero = true;
                break;
            }
        }
        if !nonzero {
            continue;
        }
        let det = poly_det(&entries);
        return Ok(MinimalMatrix { realization: real, entries, column_degrees: degrees, det });
    }
    Err(MinmatError::Singular(MIX_RETRIES))
}

/// `f ∘ w⁻¹ = τ(w)^T f` for every generator, column by column.
pub fn verify_equivariance(g: &ReflectionGroup, mm: &MinimalMatrix) -> Result<bool, MinmatError> {
    for (gi, gen) in g.generators.iter().enumerate() {
        let ginv = gen.inverse()?;
        let t = &mm.realization.generators[gi];
        for j in 0..mm.column_degrees.len() {
            let col = mm.column(j);
            for i in 0..col.len() {
                let lhs = col[i].substitute_linear(&ginv);
                let mut rhs = MultiPoly::zero(g.dim);
                for (k, f) in col.iter().enumerate() {
                    rhs = &rhs + &f.scale(&t[(k, i)]);
                }
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Column homogeneity in the stated degrees, which gives `E·M = M·diag(p)`.
pub fn verify_euler(mm: &MinimalMatrix) -> bool {
    mm.entries.iter().all(|r| {
        r.iter().zip(&mm.column_degrees).all(|(f, &p)| f.euler() == f.scale(&CycNum::from_int(p as i64)))
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DetFactorization {
    /// Power of each orbit product, `Σ_j j·n_{C,j}`.
    pub exponents: Vec<usize>,
    pub det_degree: Option<u32>,
    pub scalar: Option<CycNum>,
    pub pass: bool,
}

pub fn verify_det_factorization(g: &ReflectionGroup, table: &CharacterTable, mm: &MinimalMatrix) -> Result<DetFactorization, MinmatError> {
    let local = local_data(&table.rows[mm.realization.row], g)?;
    let exponents: Vec<usize> = local.n.iter().map(|r| r.iter().enumerate().map(|(j, &m)| j * m).sum()).collect();
    let mut prod = MultiPoly::one(g.dim);
    for (o, &k) in g.orbits.iter().zip(&exponents) {
        prod = &prod * &o.pi.pow(k as u32);
    }
    let det_degree = mm.det.homogeneous_degree().ok().flatten();
    let scalar = mm.det.divide_exact(&prod).ok().and_then(|q| q.as_constant()).filter(|c| !c.is_zero());
    let pass = scalar.is_some() && det_degree == Some(local.weighted_sum(g) as u32);
    Ok(DetFactorization { exponents, det_degree, scalar, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientReport {
    pub column_degrees: Vec<usize>,
    pub polynomial: bool,
    pub invariant: bool,
    pub pass: bool,
}

/// Random equivariant matrix with column degrees `p_j + d_1`.
pub fn sample_non_minimal(
    g: &ReflectionGroup,
    mm: &MinimalMatrix,
    fake: &FakeDegree,
    seed: u64,
) -> Result<(Vec<Vec<MultiPoly>>, Vec<usize>), MinmatError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x51));
    let shift = g.degrees[0];
    let mut cols: Vec<PolyVec> = Vec::new();
    let mut degrees = Vec::new();
    for &p in &mm.column_degrees {
        let basis = checked_equivariant_basis(g, &mm.realization, &fake.polynomial, p + shift)?;
        let coeffs: Vec<CycNum> = (0..basis.len()).map(|_| random_small(&mut rng)).collect();
        cols.push(combine(&basis, &coeffs));
        degrees.push(p + shift);
    }
    let l = cols.len();
    Ok(((0..l).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect(), degrees))
}

/// `R = M⁻¹ N = adj(M) N / det M` is polynomial and invariant.
pub fn verify_quotient_property(
    g: &ReflectionGroup,
    mm: &MinimalMatrix,
    n: &[Vec<MultiPoly>],
    column_degrees: Vec<usize>,
) -> Result<QuotientReport, MinmatError> {
    let l = mm.entries.len();
    let adj = poly_adjugate(&mm.entries);
    let mut r = vec![vec![MultiPoly::zero(g.dim); l]; l];
    let mut polynomial = true;
    for i in 0..l {
        for j in 0..l {
            let mut acc = MultiPoly::zero(g.dim);
            for k in 0..l {
                acc = &acc + &(&adj[i][k] * &n[k][j]);
            }
            match acc.divide_exact(&mm.det) {
                Ok(q) => r[i][j] = q,
                Err(_) => polynomial = false,
            }
        }
    }
    let mut invariant = polynomial;
    if polynomial {
        'gens: for gen in &g.generators {
            let ginv = gen.inverse()?;
            for row in &r {
                for f in row {
                    if f.substitute_linear(&ginv) != *f {
                        invariant = false;
                        break 'gens;
                    }
                }
            }
        }
    }
    Ok(QuotientReport { column_degrees, polynomial, invariant, pass: polynomial && invariant })
}
