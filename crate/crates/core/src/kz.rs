//! Numerical monodromy of the KZ connection on one irreducible block.
//!
//! Residues are built exactly and then embedded in complex doubles. Parallel
//! transport uses classical RK4 with step doubling and Richardson
//! extrapolation.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::chars::{local_data, CharError, CharacterTable, ClassFunction, LocalData};
use crate::exact::{parse_rational, CycNum, ExactError, Matrix};
use crate::group::ReflectionGroup;
use crate::minmat::{matrix_realization, MinmatError, Realization};

pub type CMat = DMatrix<Complex64>;

pub const DEFAULT_SEED: u64 = 0x6b7a_0001;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const CURVATURE_TOL: f64 = 1e-8;
const CALIBRATION_TOL: f64 = 1e-8;
const MATCH_TOL: f64 = 1e-6;
const PURE_BRAID_TOL: f64 = 1e-6;
const MARGIN_SAMPLES: usize = 64;
const MIN_STEP: f64 = 1e-13;
const MIN_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum KzError {
    #[error("bad label vector: {0}")]
    Labels(String),
    #[error("labels must all be integers")]
    NotIntegral,
    #[error("outside kz limits: |W| = {order} (max {max_order}), degree {degree} (max {max_degree})")]
    TooLarge { order: usize, max_order: usize, degree: usize, max_degree: usize },
    #[error("generators must be distinguished reflections")]
    Generators,
    #[error("curvature check failed: norm {0:e}")]
    Curvature(f64),
    #[error("no admissible base point after {0} attempts")]
    BasePoint(usize),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("calibration at k = 0 failed: residual {0:e}")]
    Calibration(f64),
    #[error("character match failed for row {row}: {reason}")]
    Match { row: usize, reason: String },
    #[error("gamma map is not a permutation")]
    NotPermutation,
    #[error("row {0}: {1}")]
    Invariant(usize, String),
    #[error(transparent)]
    Minmat(#[from] MinmatError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug)]
pub struct KzConfig {
    /// Local relative error per accepted step.
    pub tolerance: f64,
    pub seed: u64,
    pub max_attempts: usize,
    pub max_order: usize,
    pub max_degree: usize,
}

impl Default for KzConfig {
    fn default() -> Self {
        KzConfig { tolerance: DEFAULT_TOLERANCE, seed: DEFAULT_SEED, max_attempts: 64, max_order: 48, max_degree: 4 }
    }
}

impl KzConfig {
    fn check_size(&self, g: &ReflectionGroup, degree: usize) -> Result<(), KzError> {
        if g.order() > self.max_order || degree > self.max_degree {
            return Err(KzError::TooLarge {
                order: g.order(),
                max_order: self.max_order,
                degree,
                max_degree: self.max_degree,
            });
        }
        Ok(())
    }
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn root_of_unity(e: usize, j: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / e as f64)
}

// ---------------------------------------------------------------------------
// Labels

/// Labels `k[C][j]`, one list per hyperplane orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelVector {
    pub k: Vec<Vec<Complex64>>,
}

impl LabelVector {
    pub fn zeros(g: &ReflectionGroup) -> Self {
        LabelVector { k: g.orbits.iter().map(|o| vec![Complex64::zero(); o.order]).collect() }
    }

    pub fn new(g: &ReflectionGroup, k: Vec<Vec<Complex64>>) -> Result<Self, KzError> {
        if k.len() != g.orbits.len() {
            return Err(KzError::Labels(format!("expected {} orbits, got {}", g.orbits.len(), k.len())));
        }
        for (c, (row, o)) in k.iter().zip(&g.orbits).enumerate() {
            if row.len() != o.order {
                return Err(KzError::Labels(format!("orbit {c} needs {} labels, got {}", o.order, row.len())));
            }
        }
        Ok(LabelVector { k })
    }

    pub fn from_real(g: &ReflectionGroup, k: &[Vec<f64>]) -> Result<Self, KzError> {
        Self::new(g, k.iter().map(|r| r.iter().map(|&x| c64(x, 0.0)).collect()).collect())
    }

    /// Parse `{"0": [k0, k1], "1": [...]}`. A label is a number, a rational
    /// string like `"1/3"`, or a pair `[re, im]`.
    pub fn from_json(g: &ReflectionGroup, v: &Value) -> Result<Self, KzError> {
        let obj = v.as_object().ok_or_else(|| KzError::Labels("expected a JSON object".into()))?;
        let mut k: Vec<Option<Vec<Complex64>>> = vec![None; g.orbits.len()];
        for (key, list) in obj {
            let c: usize = key.trim().parse().map_err(|_| KzError::Labels(format!("bad orbit index {key:?}")))?;
            if c >= k.len() {
                return Err(KzError::Labels(format!("orbit index {c} out of range")));
            }
            let items = list.as_array().ok_or_else(|| KzError::Labels(format!("orbit {c}: expected a list")))?;
            let vals = items.iter().map(parse_label).collect::<Result<Vec<_>, _>>()?;
            k[c] = Some(vals);
        }
        let k = k
            .into_iter()
            .enumerate()
            .map(|(c, r)| r.ok_or_else(|| KzError::Labels(format!("missing orbit {c}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(g, k)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (c, row) in self.k.iter().enumerate() {
            let vals: Vec<Value> = row
                .iter()
                .map(|z| if z.im == 0.0 { json!(z.re) } else { json!([z.re, z.im]) })
                .collect();
            m.insert(c.to_string(), Value::Array(vals));
        }
        Value::Object(m)
    }

    pub fn is_integral(&self) -> bool {
        self.k.iter().flatten().all(|z| z.im == 0.0 && z.re.fract() == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.k.iter().flatten().all(|z| z.is_zero())
    }

    pub fn neg(&self) -> Self {
        LabelVector { k: self.k.iter().map(|r| r.iter().map(|z| -z).collect()).collect() }
    }

    /// `q = exp(−2πi k)`.
    pub fn q(&self, c: usize, j: usize) -> Complex64 {
        (c64(0.0, -2.0 * PI) * self.k[c][j]).exp()
    }

    /// Expected eigenvalue `q_j ζ^j` of a generator around a hyperplane in orbit `c`.
    pub fn eigenvalue(&self, c: usize, j: usize) -> Complex64 {
        self.q(c, j) * root_of_unity(self.k[c].len(), j as i64)
    }
}

fn parse_label(v: &Value) -> Result<Complex64, KzError> {
    let bad = || KzError::Labels(format!("bad label {v}"));
    let real = |v: &Value| -> Result<f64, KzError> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(bad),
            Value::String(s) => parse_rational(s).ok().and_then(|r| r.to_f64()).ok_or_else(bad),
            _ => Err(bad()),
        }
    };
    match v {
        Value::Array(pair) if pair.len() == 2 => Ok(c64(real(&pair[0])?, real(&pair[1])?)),
        _ => Ok(c64(real(v)?, 0.0)),
    }
}

// ---------------------------------------------------------------------------
// Connection

/// `τ(ε_j(H))` for `j = 0..e_H`, exactly.
pub fn idempotent_images(g: &ReflectionGroup, real: &Realization, h: usize) -> Result<Vec<Matrix>, KzError> {
    let hp = &g.hyperplanes[h];
    let e = hp.order;
    let inv_e = CycNum::from_frac(1, e as i64);
    (0..e)
        .map(|j| {
            let mut acc = Matrix::zeros(real.dim, real.dim);
            for &w in &hp.stabilizer {
                let c = g.dets[w].pow(j as i64)?;
                acc = &acc + &real.elements[w].scale(&c);
            }
            Ok(acc.scale(&inv_e))
        })
        .collect()
}

/// Character of a realization, read off its class representatives.
pub fn realization_character(g: &ReflectionGroup, real: &Realization) -> ClassFunction {
    ClassFunction::new(g.classes.iter().map(|c| real.elements[c.representative].trace()).collect())
}

#[derive(Clone, Debug)]
pub struct ConnectionBlock {
    pub row: usize,
    pub dim: usize,
    pub labels: LabelVector,
    /// `τ(w)` for every group element.
    pub elements: Vec<CMat>,
    pub normals: Vec<Vec<Complex64>>,
    /// `A_H`, one per hyperplane.
    pub residues: Vec<CMat>,
    pub local: LocalData,
    pub curvature: f64,
}

impl ConnectionBlock {
    /// `ω_v(x) = Σ_H A_H α_H(x)/α_H(v)`.
    pub fn omega(&self, v: &[Complex64], x: &[Complex64]) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for (a, n) in self.residues.iter().zip(&self.normals) {
            out += a * (dot(n, x) / dot(n, v));
        }
        out
    }

    pub fn residue_sum(&self) -> CMat {
        self.residues.iter().fold(CMat::zeros(self.dim, self.dim), |acc, a| acc + a)
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn assemble_connection(
    g: &ReflectionGroup,
    real: &Realization,
    k: &LabelVector,
    cfg: &KzConfig,
) -> Result<ConnectionBlock, KzError> {
    cfg.check_size(g, real.dim)?;
    let chi = realization_character(g, real);
    let local = local_data(&chi, g)?;
    let mut residues = Vec::with_capacity(g.hyperplanes.len());
    for (h, hp) in g.hyperplanes.iter().enumerate() {
        let e = hp.order as f64;
        let mut a = CMat::zeros(real.dim, real.dim);
        for (j, p) in idempotent_images(g, real, h)?.iter().enumerate() {
            a += p.to_complex() * (k.k[hp.orbit][j] * e);
        }
        residues.push(a);
    }
    let mut block = ConnectionBlock {
        row: real.row,
        dim: real.dim,
        labels: k.clone(),
        elements: real.elements.iter().map(Matrix::to_complex).collect(),
        normals: g.hyperplanes.iter().map(|h| h.normal.iter().map(CycNum::to_complex).collect()).collect(),
        residues,
        local,
        curvature: 0.0,
    };
    block.curvature = curvature(&block, cfg.seed);
    if block.curvature > CURVATURE_TOL {
        return Err(KzError::Curvature(block.curvature));
    }
    Ok(block)
}

/// ω is closed term by term, so the curvature at `v` on `(x, y)` is the
/// commutator `[ω_v(x), ω_v(y)]`. Relative to the size of the factors.
fn curvature(block: &ConnectionBlock, seed: u64) -> f64 {
    let n = block.normals.first().map_or(0, Vec::len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ff);
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let mut draw = || -> Vec<Complex64> {
            (0..n).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
        };
        let (v, x, y) = (draw(), draw(), draw());
        let a = block.omega(&v, &x);
        let b = block.omega(&v, &y);
        let comm = &a * &b - &b * &a;
        worst = worst.max(comm.norm() / (1.0 + a.norm() * b.norm()));
    }
    worst
}

/// `s(τ,k) = (1/deg τ) Σ_C e_C |C| Σ_j k_{C,j} n_{C,j}`.
pub fn euler_scalar(g: &ReflectionGroup, tau: &ClassFunction, k: &LabelVector) -> Result<Complex64, KzError> {
    let local = local_data(tau, g)?;
    let deg = tau.degree().to_complex().re;
    let mut s = Complex64::zero();
    for (c, o) in g.orbits.iter().enumerate() {
        let inner: Complex64 = (0..o.order).map(|j| k.k[c][j] * local.n[c][j] as f64).sum();
        s += inner * (o.order * o.members.len()) as f64;
    }
    Ok(s / deg)
}

// ---------------------------------------------------------------------------
// Paths

/// Piece of a path on the line `p + zν`.
#[derive(Clone, Copy, Debug)]
pub enum Piece {
    /// `z` moves linearly from `from` to `to`.
    Leg { from: Complex64, to: Complex64 },
    /// `z = r·exp(iθt)`.
    Arc { radius: f64, angle: f64 },
}

impl Piece {
    fn z(&self, t: f64) -> Complex64 {
        match *self {
            Piece::Leg { from, to } => from + (to - from) * t,
            Piece::Arc { radius, angle } => Complex64::from_polar(radius, angle * t),
        }
    }

    fn dz(&self, t: f64) -> Complex64 {
        match *self {
            Piece::Leg { from, to } => to - from,
            Piece::Arc { radius, angle } => c64(0.0, angle) * Complex64::from_polar(radius, angle * t),
        }
    }
}

/// Path from `v0` to `s_H v0`: in towards `H` along `ν`, a `1/e_H` turn at
/// radius `radius`, and back out. With `radius = 1` it is the plain arc.
#[derive(Clone, Debug)]
pub struct BraidPath {
    pub hyperplane: usize,
    pub foot: Vec<Complex64>,
    pub nu: Vec<Complex64>,
    pub radius: f64,
    pub pieces: Vec<Piece>,
}

impl BraidPath {
    pub fn point_on(&self, piece: usize, t: f64) -> Vec<Complex64> {
        let z = self.pieces[piece].z(t);
        self.foot.iter().zip(&self.nu).map(|(p, n)| p + n * z).collect()
    }

    /// Global parameter, pieces of equal length in `t`.
    pub fn point(&self, t: f64) -> Vec<Complex64> {
        let m = self.pieces.len();
        let s = (t.clamp(0.0, 1.0) * m as f64).min(m as f64 - 1e-300);
        let i = (s.floor() as usize).min(m - 1);
        self.point_on(i, s - i as f64)
    }

    pub fn sample(&self, n: usize) -> Vec<Vec<Complex64>> {
        (0..=n).map(|i| self.point(i as f64 / n as f64)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct BasePoint {
    pub point: Vec<Complex64>,
    pub margin: f64,
    pub seed: u64,
    pub attempts: usize,
    /// One path per group generator.
    pub paths: Vec<BraidPath>,
}

fn distance(n: &[Complex64], v: &[Complex64]) -> f64 {
    dot(n, v).norm() / norm(n)
}

/// Path for hyperplane `h` from `v0`; `None` if it passes within `delta` of
/// another hyperplane.
pub fn braid_path(g: &ReflectionGroup, h: usize, v0: &[Complex64], delta: f64) -> Option<BraidPath> {
    let hp = &g.hyperplanes[h];
    let e = hp.order;
    let zeta = root_of_unity(e, 1);
    let s = g.elements[hp.distinguished].to_complex();
    let v = nalgebra::DVector::from_column_slice(v0);
    let nu_v = (&s * &v - &v) / (zeta - 1.0);
    let nu: Vec<Complex64> = nu_v.iter().copied().collect();
    let foot: Vec<Complex64> = v0.iter().zip(&nu).map(|(a, b)| a - b).collect();
    let normals: Vec<Vec<Complex64>> =
        g.hyperplanes.iter().map(|x| x.normal.iter().map(CycNum::to_complex).collect()).collect();
    let mut nearest = f64::INFINITY;
    for (i, n) in normals.iter().enumerate() {
        if i == h {
            continue;
        }
        let a = dot(n, &nu);
        if a.norm() > 1e-14 * norm(n) * norm(&nu) {
            nearest = nearest.min((-dot(n, &foot) / a).norm());
        }
    }
    let radius = (0.5 * nearest).min(1.0);
    let pieces = if radius < 1.0 {
        vec![
            Piece::Leg { from: c64(1.0, 0.0), to: c64(radius, 0.0) },
            Piece::Arc { radius, angle: 2.0 * PI / e as f64 },
            Piece::Leg { from: zeta * radius, to: zeta },
        ]
    } else {
        vec![Piece::Arc { radius: 1.0, angle: 2.0 * PI / e as f64 }]
    };
    let path = BraidPath { hyperplane: h, foot, nu, radius, pieces };
    for pi in 0..path.pieces.len() {
        for i in 0..=MARGIN_SAMPLES {
            let pt = path.point_on(pi, i as f64 / MARGIN_SAMPLES as f64);
            for (j, n) in normals.iter().enumerate() {
                if j != h && distance(n, &pt) < delta {
                    return None;
                }
            }
        }
    }
    Some(path)
}

/// Deterministic base point with admissible paths for every generator.
pub fn admissible_base_point(g: &ReflectionGroup, cfg: &KzConfig) -> Result<BasePoint, KzError> {
    let hs: Vec<usize> = (0..g.num_generators())
        .map(|gi| g.hyperplane_of_generator(gi).ok_or(KzError::Generators))
        .collect::<Result<_, _>>()?;
    let normals: Vec<Vec<Complex64>> =
        g.hyperplanes.iter().map(|x| x.normal.iter().map(CycNum::to_complex).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for attempt in 1..=cfg.max_attempts {
        // Multiples of 1/64 keep the point exactly representable.
        let v0: Vec<Complex64> = (0..g.dim)
            .map(|_| c64(rng.gen_range(-64..=64) as f64 / 64.0, rng.gen_range(-64..=64) as f64 / 64.0))
            .collect();
        let dist = normals.iter().map(|n| distance(n, &v0)).fold(f64::INFINITY, f64::min);
        if dist < 1e-3 {
            continue;
        }
        let margin = 0.1 * dist;
        let paths: Option<Vec<BraidPath>> = hs.iter().map(|&h| braid_path(g, h, &v0, margin)).collect();
        if let Some(paths) = paths {
            return Ok(BasePoint { point: v0, margin, seed: cfg.seed, attempts: attempt, paths });
        }
    }
    Err(KzError::BasePoint(cfg.max_attempts))
}

// ---------------------------------------------------------------------------
// Transport

fn rk4(f: &impl Fn(f64) -> CMat, t: f64, y: &CMat, h: f64) -> CMat {
    let (half, full) = (c64(h / 2.0, 0.0), c64(h, 0.0));
    let two = c64(2.0, 0.0);
    let k1 = f(t) * y;
    let k2 = f(t + h / 2.0) * (y + &k1 * half);
    let k3 = f(t + h / 2.0) * (y + &k2 * half);
    let k4 = f(t + h) * (y + &k3 * full);
    y + (k1 + k2 * two + k3 * two + k4) * c64(h / 6.0, 0.0)
}

/// Solve `Y' = F(t)Y`, `Y(0) = I` on `[0, 1]`. Returns `Y(1)` and the number
/// of accepted steps.
fn integrate(f: impl Fn(f64) -> CMat, dim: usize, tol: f64) -> Result<(CMat, usize), KzError> {
    let mut y = CMat::identity(dim, dim);
    let (mut t, mut h, mut steps) = (0.0f64, 1.0f64 / 64.0, 0usize);
    while t < 1.0 {
        h = h.min(1.0 - t);
        let full = rk4(&f, t, &y, h);
        let half = rk4(&f, t, &y, h / 2.0);
        let two = rk4(&f, t + h / 2.0, &half, h / 2.0);
        let diff = (&two - &full) / c64(15.0, 0.0);
        let err = diff.norm();
        let scale = two.norm().max(1.0);
        if err <= tol * scale {
            t = if 1.0 - t - h < 1e-15 { 1.0 } else { t + h };
            y = two + diff;
            steps += 1;
        }
        let factor = if err == 0.0 { 4.0 } else { (0.9 * (tol * scale / err).powf(0.2)).clamp(0.2, 4.0) };
        h *= factor;
        if h < MIN_STEP && t < 1.0 {
            return Err(KzError::StepUnderflow(t));
        }
    }
    Ok((y, steps))
}

/// Parallel transport of `Φ' = −ω(v'(t))Φ` along the whole path.
pub fn transport(block: &ConnectionBlock, path: &BraidPath, tol: f64) -> Result<(CMat, usize), KzError> {
    let a: Vec<Complex64> = block.normals.iter().map(|n| dot(n, &path.nu)).collect();
    let b: Vec<Complex64> = block.normals.iter().map(|n| dot(n, &path.foot)).collect();
    let mut u = CMat::identity(block.dim, block.dim);
    let mut steps = 0;
    for piece in &path.pieces {
        let f = |t: f64| {
            let (z, dz) = (piece.z(t), piece.dz(t));
            let mut out = CMat::zeros(block.dim, block.dim);
            for (h, res) in block.residues.iter().enumerate() {
                out -= res * (a[h] * dz / (b[h] + a[h] * z));
            }
            out
        };
        let (y, n) = integrate(f, block.dim, tol)?;
        u = y * u;
        steps += n;
    }
    Ok((u, steps))
}

// ---------------------------------------------------------------------------
// Monodromy

#[derive(Clone, Debug)]
pub struct GeneratorMonodromy {
    pub generator: usize,
    pub hyperplane: usize,
    pub orbit: usize,
    pub order: usize,
    /// `T_H = τ(s_H)⁻¹ U_H`, with `U_H` the transport along the path.
    pub matrix: CMat,
    /// `T_H⁻¹`: the braid generator acting on solutions, equal to `τ(s_H)` at `k = 0`.
    pub action: CMat,
    pub steps: usize,
    pub hecke_residual: f64,
    pub det_residual: f64,
    pub calibration_residual: f64,
}

#[derive(Clone, Debug)]
pub struct MonodromyRep {
    pub row: usize,
    pub base: BasePoint,
    pub tolerance: f64,
    pub generators: Vec<GeneratorMonodromy>,
}

/// `‖Π_j (T − q_j ζ^j)‖`.
pub fn hecke_residual(t: &CMat, k: &LabelVector, orbit: usize) -> f64 {
    let n = t.nrows();
    let mut acc = CMat::identity(n, n);
    for j in 0..k.k[orbit].len() {
        acc *= t - CMat::identity(n, n) * k.eigenvalue(orbit, j);
    }
    acc.norm()
}

pub fn hecke_check(m: &MonodromyRep, k: &LabelVector) -> Vec<f64> {
    m.generators.iter().map(|x| hecke_residual(&x.matrix, k, x.orbit)).collect()
}

fn expected_det(block: &ConnectionBlock, k: &LabelVector, orbit: usize) -> Complex64 {
    let mut d = c64(1.0, 0.0);
    for (j, &n) in block.local.n[orbit].iter().enumerate() {
        d *= k.eigenvalue(orbit, j).powu(n as u32);
    }
    d
}

pub fn monodromy(g: &ReflectionGroup, block: &ConnectionBlock, base: &BasePoint, cfg: &KzConfig) -> Result<MonodromyRep, KzError> {
    cfg.check_size(g, block.dim)?;
    let k = &block.labels;
    let zero = ConnectionBlock {
        residues: vec![CMat::zeros(block.dim, block.dim); block.residues.len()],
        ..block.clone()
    };
    let mut gens = Vec::with_capacity(base.paths.len());
    for (gi, path) in base.paths.iter().enumerate() {
        let h = path.hyperplane;
        let hp = &g.hyperplanes[h];
        let tau_s = &block.elements[hp.distinguished];
        let tau_s_inv = tau_s.clone().try_inverse().ok_or_else(|| KzError::Invariant(block.row, "τ(s) singular".into()))?;

        let (u0, _) = transport(&zero, path, cfg.tolerance)?;
        let act0 = (&tau_s_inv * u0).try_inverse().ok_or_else(|| KzError::Invariant(block.row, "singular".into()))?;
        let calibration_residual = (act0 - tau_s).norm();
        if calibration_residual > CALIBRATION_TOL {
            return Err(KzError::Calibration(calibration_residual));
        }

        let (u, steps) = transport(block, path, cfg.tolerance)?;
        let matrix = &tau_s_inv * u;
        let action = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| KzError::Invariant(block.row, "monodromy matrix singular".into()))?;
        gens.push(GeneratorMonodromy {
            generator: gi,
            hyperplane: h,
            orbit: hp.orbit,
            order: hp.order,
            hecke_residual: hecke_residual(&matrix, k, hp.orbit),
            det_residual: (matrix.determinant() - expected_det(block, k, hp.orbit)).norm(),
            matrix,
            action,
            steps,
            calibration_residual,
        });
    }
    Ok(MonodromyRep { row: block.row, base: base.clone(), tolerance: cfg.tolerance, generators: gens })
}

/// Realize `row`, assemble its connection and compute the generator matrices.
pub fn monodromy_for_row(
    g: &ReflectionGroup,
    table: &CharacterTable,
    row: usize,
    k: &LabelVector,
    cfg: &KzConfig,
) -> Result<(ConnectionBlock, MonodromyRep), KzError> {
    let deg = table.rows[row].degree_usize().unwrap_or(usize::MAX);
    cfg.check_size(g, deg)?;
    if !g.generators_are_distinguished() {
        return Err(KzError::Generators);
    }
    let real = matrix_realization(g, table, row)?;
    let block = assemble_connection(g, &real, k, cfg)?;
    let base = admissible_base_point(g, cfg)?;
    let rep = monodromy(g, &block, &base, cfg)?;
    Ok((block, rep))
}

// ---------------------------------------------------------------------------
// γ(k)

pub const GAMMA_CONVENTION: &str = "pair (i, j): the monodromy representation at labels k started from row i \
     has the character of row j, i.e. tau -> tau(k); the braid generator acts by the inverse of \
     tau(s_H)^-1 U_H, so k = 0 gives the identity map; gamma(k) in the sense tau -> tau(-k) is this map at -k";

#[derive(Clone, Debug)]
pub struct GammaEntry {
    pub row: usize,
    pub image: usize,
    /// Largest deviation from the matched row over all classes.
    pub distance: f64,
    /// Same, for the closest other row.
    pub runner_up: f64,
    pub pure_braid_residual: f64,
    pub hecke_residual: f64,
    /// Integrator tolerance that was finally used.
    pub tolerance: f64,
}

#[derive(Clone, Debug)]
pub struct GammaResult {
    pub labels: LabelVector,
    pub base: BasePoint,
    pub permutation: Vec<usize>,
    pub entries: Vec<GammaEntry>,
}

/// Character of the monodromy representation on each class, through the
/// stored generator words of the class representatives.
/// `max_H ‖T_H^{e_H} − I‖`; vanishes for integral labels.
pub fn pure_braid_residual(rep: &MonodromyRep) -> f64 {
    rep.generators
        .iter()
        .map(|x| {
            let n = x.matrix.nrows();
            (x.matrix.pow(x.order as u32) - CMat::identity(n, n)).norm()
        })
        .fold(0.0, f64::max)
}

pub fn monodromy_character(g: &ReflectionGroup, rep: &MonodromyRep) -> Vec<Complex64> {
    let dim = rep.generators.first().map_or(1, |x| x.action.nrows());
    g.classes
        .iter()
        .map(|c| {
            let mut m = CMat::identity(dim, dim);
            for &gi in &g.words[c.representative] {
                m *= &rep.generators[gi].action;
            }
            m.trace()
        })
        .collect()
}

pub fn gamma_permutation(
    g: &ReflectionGroup,
    table: &CharacterTable,
    k: &LabelVector,
    cfg: &KzConfig,
) -> Result<GammaResult, KzError> {
    if !k.is_integral() {
        return Err(KzError::NotIntegral);
    }
    if !g.generators_are_distinguished() {
        return Err(KzError::Generators);
    }
    let base = admissible_base_point(g, cfg)?;
    let numeric: Vec<Vec<Complex64>> =
        table.rows.iter().map(|r| r.values.iter().map(CycNum::to_complex).collect()).collect();
    let locals: Vec<LocalData> = table.rows.iter().map(|r| local_data(r, g)).collect::<Result<_, _>>()?;
    let degrees = table.degrees();
    let mut entries = Vec::with_capacity(table.len());
    for row in 0..table.len() {
        cfg.check_size(g, degrees[row])?;
        let real = matrix_realization(g, table, row)?;
        let block = assemble_connection(g, &real, k, cfg)?;
        // Large integral labels amplify integration error; tighten before giving up.
        let mut tolerance = cfg.tolerance;
        let (rep, pure) = loop {
            let rep = monodromy(g, &block, &base, &KzConfig { tolerance, ..cfg.clone() })?;
            let pure = pure_braid_residual(&rep);
            if pure <= PURE_BRAID_TOL || tolerance <= MIN_TOLERANCE {
                break (rep, pure);
            }
            tolerance /= 100.0;
        };
        if pure > PURE_BRAID_TOL {
            return Err(KzError::Invariant(row, format!("pure braid residual {pure:e}")));
        }
        let chi = monodromy_character(g, &rep);
        let mut dists: Vec<(f64, usize)> = numeric
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(&chi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max), i))
            .collect();
        dists.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (distance, image) = dists[0];
        let runner_up = dists.get(1).map_or(f64::INFINITY, |d| d.0);
        if distance > MATCH_TOL {
            return Err(KzError::Match { row, reason: format!("closest row {image} at distance {distance:e}") });
        }
        if runner_up <= MATCH_TOL {
            return Err(KzError::Match { row, reason: "two rows within tolerance".into() });
        }
        if degrees[image] != degrees[row] {
            return Err(KzError::Invariant(row, format!("degree changed to that of row {image}")));
        }
        if locals[image] != locals[row] {
            return Err(KzError::Invariant(row, format!("local data differ from row {image}")));
        }
        let hecke = rep.generators.iter().map(|x| x.hecke_residual).fold(0.0, f64::max);
        entries.push(GammaEntry {
            row,
            image,
            distance,
            runner_up,
            pure_braid_residual: pure,
            hecke_residual: hecke,
            tolerance,
        });
    }
    let permutation: Vec<usize> = entries.iter().map(|e| e.image).collect();
    let mut seen = vec![false; permutation.len()];
    for &p in &permutation {
        if std::mem::replace(&mut seen[p], true) {
            return Err(KzError::NotPermutation);
        }
    }
    Ok(GammaResult { labels: k.clone(), base, permutation, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::character_table;
    use crate::group::{build_group, Descriptor};

    fn setup(s: &str) -> (ReflectionGroup, CharacterTable) {
        let g = build_group(&s.parse::<Descriptor>().unwrap()).unwrap();
        let t = character_table(&g).unwrap();
        (g, t)
    }

    fn row_of_det_power(g: &ReflectionGroup, t: &CharacterTable, p: i64) -> usize {
        let vals = g.classes.iter().map(|c| g.dets[c.representative].pow(p).unwrap()).collect();
        t.find(&ClassFunction::new(vals)).unwrap()
    }

    #[test]
    fn parse_labels() {
        let (g, _) = setup("G(3,1,1)");
        let v: Value = serde_json::from_str(r#"{"0": [0, "1/3", [0.5, -0.25]]}"#).unwrap();
        let k = LabelVector::from_json(&g, &v).unwrap();
        assert!((k.k[0][1].re - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(k.k[0][2], c64(0.5, -0.25));
        assert!(!k.is_integral());
        let v: Value = serde_json::from_str(r#"{"0": [0, "4/2", -1]}"#).unwrap();
        assert!(LabelVector::from_json(&g, &v).unwrap().is_integral());
        let v: Value = serde_json::from_str(r#"{"0": [0, 1]}"#).unwrap();
        assert!(LabelVector::from_json(&g, &v).is_err());
        assert!(LabelVector::from_json(&g, &json!({})).is_err());
    }

    #[test]
    fn zero_labels_give_zero_residues() {
        let (g, t) = setup("S3");
        let real = matrix_realization(&g, &t, 2).unwrap();
        let b = assemble_connection(&g, &real, &LabelVector::zeros(&g), &KzConfig::default()).unwrap();
        assert!(b.residues.iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn cyclic_residue_is_scalar() {
        let (g, t) = setup("G(3,1,1)");
        let k = LabelVector::new(&g, vec![vec![c64(0.1, 0.0), c64(0.2, 0.05), c64(-0.3, 0.0)]]).unwrap();
        for j in 0..3 {
            let row = row_of_det_power(&g, &t, -(j as i64));
            let real = matrix_realization(&g, &t, row).unwrap();
            let b = assemble_connection(&g, &real, &k, &KzConfig::default()).unwrap();
            assert!((b.residues[0][(0, 0)] - k.k[0][j] * 3.0).norm() < 1e-14);
        }
    }

    #[test]
    fn euler_scalar_examples() {
        let (g, t) = setup("S3");
        let k = LabelVector::from_real(&g, &[vec![0.0, 1.0]]).unwrap();
        assert!((euler_scalar(&g, &t.rows[2], &k).unwrap() - 3.0).norm() < 1e-14);
        let k = LabelVector::from_real(&g, &[vec![1.0, 0.0]]).unwrap();
        assert!((euler_scalar(&g, &t.rows[0], &k).unwrap() - 6.0).norm() < 1e-14);
        assert!(euler_scalar(&g, &t.rows[2], &LabelVector::zeros(&g)).unwrap().norm() == 0.0);
    }

    #[test]
    fn residue_sum_is_scalar() {
        let (g, t) = setup("G(2,1,2)");
        let k = LabelVector::new(&g, vec![vec![c64(0.1, 0.2), c64(-0.05, 0.0)], vec![c64(0.25, 0.0), c64(0.0, 0.1)]]).unwrap();
        for row in 0..t.len() {
            let real = matrix_realization(&g, &t, row).unwrap();
            let b = assemble_connection(&g, &real, &k, &KzConfig::default()).unwrap();
            let s = euler_scalar(&g, &t.rows[row], &k).unwrap();
            let diff = b.residue_sum() - CMat::identity(b.dim, b.dim) * s;
            assert!(diff.norm() < 1e-10, "row {row}");
        }
    }

    #[test]
    fn path_endpoints() {
        for s in ["G(3,1,1)", "S3", "G(2,1,2)", "G(4,4,2)"] {
            let (g, _) = setup(s);
            let base = admissible_base_point(&g, &KzConfig::default()).unwrap();
            for p in &base.paths {
                let s_h = g.elements[g.hyperplanes[p.hyperplane].distinguished].to_complex();
                let target = &s_h * nalgebra::DVector::from_column_slice(&base.point);
                let end = p.point(1.0);
                let err: f64 = end.iter().zip(target.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err < 1e-12, "{s}: {err}");
                let start = p.point(0.0);
                assert!(start.iter().zip(&base.point).all(|(a, b)| (a - b).norm() < 1e-12));
            }
        }
    }

    #[test]
    fn cyclic_arc_is_a_third_turn() {
        let (g, _) = setup("G(3,1,1)");
        let base = admissible_base_point(&g, &KzConfig::default()).unwrap();
        let p = &base.paths[0];
        assert_eq!(p.radius, 1.0);
        let mid = p.point(0.5);
        let expect = base.point[0] * root_of_unity(6, 1);
        assert!((mid[0] - expect).norm() < 1e-12);
    }

    #[test]
    fn cyclic_monodromy_matches_closed_form() {
        let (g, t) = setup("G(3,1,1)");
        let cfg = KzConfig::default();
        let k = LabelVector::new(&g, vec![vec![c64(0.1, 0.05), c64(-0.2, 0.1), c64(0.27, -0.1)]]).unwrap();
        for j in 0..3 {
            let row = row_of_det_power(&g, &t, -(j as i64));
            let (_, rep) = monodromy_for_row(&g, &t, row, &k, &cfg).unwrap();
            let got = rep.generators[0].matrix[(0, 0)];
            let want = (c64(0.0, 2.0 * PI) * (c64(j as f64, 0.0) - k.k[0][j] * 3.0) / 3.0).exp();
            assert!((got - want).norm() < 1e-8, "j = {j}: {got} vs {want}");
            assert!(rep.generators[0].hecke_residual < 1e-8);
        }
    }

    #[test]
    fn zero_labels_reproduce_reflections() {
        let (g, t) = setup("S3");
        let cfg = KzConfig::default();
        let (block, rep) = monodromy_for_row(&g, &t, 2, &LabelVector::zeros(&g), &cfg).unwrap();
        for x in &rep.generators {
            let s = &block.elements[g.hyperplanes[x.hyperplane].distinguished];
            assert!((&x.action - s).norm() < 1e-8);
            assert!(x.hecke_residual < 1e-8);
        }
    }

    #[test]
    fn standard_rep_hecke_relation() {
        let (g, t) = setup("S3");
        let k = LabelVector::new(&g, vec![vec![c64(0.13, 0.07), c64(-0.21, 0.02)]]).unwrap();
        let (_, rep) = monodromy_for_row(&g, &t, 2, &k, &KzConfig::default()).unwrap();
        for x in &rep.generators {
            assert!(x.hecke_residual < 1e-6, "{}", x.hecke_residual);
            assert!(x.det_residual < 1e-6, "{}", x.det_residual);
        }
    }

    #[test]
    fn gamma_at_zero_is_identity() {
        let (g, t) = setup("S3");
        let r = gamma_permutation(&g, &t, &LabelVector::zeros(&g), &KzConfig::default()).unwrap();
        assert_eq!(r.permutation, vec![0, 1, 2]);
    }

    #[test]
    fn gamma_rejects_fractional_labels() {
        let (g, t) = setup("S3");
        let k = LabelVector::from_real(&g, &[vec![0.5, 0.0]]).unwrap();
        assert!(matches!(gamma_permutation(&g, &t, &k, &KzConfig::default()), Err(KzError::NotIntegral)));
    }

    #[test]
    fn size_limit_enforced() {
        let (g, t) = setup("S4");
        let cfg = KzConfig { max_order: 10, ..KzConfig::default() };
        assert!(matches!(monodromy_for_row(&g, &t, 0, &LabelVector::zeros(&g), &cfg), Err(KzError::TooLarge { .. })));
    }
}
