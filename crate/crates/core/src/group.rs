//! Finite complex reflection groups: construction, enumeration, reflections,
//! hyperplane orbits, conjugacy classes and invariant degrees.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num::integer::Integer;
use thiserror::Error;

use crate::exact::{CycNum, ExactError, Matrix, MultiPoly, PolyT, SeriesT};

pub const DEFAULT_MAX_ORDER: usize = 50_000;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("cannot parse group descriptor '{0}'")]
    BadDescriptor(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("group order {0} exceeds the configured cap {1}")]
    OrderCap(String, usize),
    #[error("generator {0} is not unitary for the invariant form")]
    NonUnitary(usize),
    #[error("reflections do not generate the group ({0} of {1} elements)")]
    NotReflectionGroup(usize, usize),
    #[error("generator file: {0}")]
    File(String),
    #[error("degree extraction failed: {0}")]
    Degrees(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `S<n>` | `G(m,p,n)` | `file:<path>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Descriptor {
    Sym(usize),
    Imprimitive { m: usize, p: usize, n: usize },
    File(PathBuf),
}

impl FromStr for Descriptor {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, GroupError> {
        let t = s.trim();
        let bad = || GroupError::BadDescriptor(s.to_string());
        if let Some(path) = t.strip_prefix("file:") {
            if path.is_empty() {
                return Err(bad());
            }
            return Ok(Descriptor::File(PathBuf::from(path)));
        }
        if let Some(n) = t.strip_prefix('S') {
            let n: usize = n.parse().map_err(|_| bad())?;
            if n < 2 {
                return Err(GroupError::InvalidParameters(format!("S{n}: need n >= 2")));
            }
            return Ok(Descriptor::Sym(n));
        }
        let inner = t
            .strip_prefix("G(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let parts: Vec<usize> = inner
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let [m, p, n] = parts[..] else {
            return Err(bad());
        };
        if m < 2 {
            return Err(GroupError::InvalidParameters(format!("G({m},{p},{n}): need m >= 2")));
        }
        if n < 1 {
            return Err(GroupError::InvalidParameters(format!("G({m},{p},{n}): need n >= 1")));
        }
        if p == 0 || m % p != 0 {
            return Err(GroupError::InvalidParameters(format!("G({m},{p},{n}): p must divide m")));
        }
        if n == 1 && p != 1 {
            return Err(GroupError::InvalidParameters(format!("G({m},{p},1): need p = 1 when n = 1")));
        }
        Ok(Descriptor::Imprimitive { m, p, n })
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Sym(n) => write!(f, "S{n}"),
            Descriptor::Imprimitive { m, p, n } => write!(f, "G({m},{p},{n})"),
            Descriptor::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Hyperplane {
    /// Coefficient row of the linear form, first nonzero entry equal to 1.
    pub normal: Vec<CycNum>,
    pub alpha: MultiPoly,
    /// Order of the pointwise stabilizer.
    pub order: usize,
    /// Reflection with determinant exp(2πi/order).
    pub distinguished: usize,
    /// Pointwise stabilizer, identity first.
    pub stabilizer: Vec<usize>,
    pub orbit: usize,
}

#[derive(Clone, Debug)]
pub struct HyperplaneOrbit {
    pub members: Vec<usize>,
    pub order: usize,
    /// Product of the member linear forms.
    pub pi: MultiPoly,
    /// `χ(g)` with `π ∘ g⁻¹ = χ(g) π`, one value per generator.
    pub generator_character: Vec<CycNum>,
}

#[derive(Clone, Debug)]
pub struct ConjugacyClass {
    pub representative: usize,
    pub members: Vec<usize>,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Clone, Debug)]
pub struct ReflectionGroup {
    pub descriptor: String,
    pub dim: usize,
    /// Hermitian form preserved by every element.
    pub gram: Matrix,
    pub generators: Vec<Matrix>,
    /// Field containing matrix entries and all character values.
    pub conductor: u32,
    /// Least common multiple of element orders.
    pub exponent: usize,
    pub elements: Vec<Matrix>,
    /// Shortlex-minimal generator word for each element; `[i, j]` is `g_i g_j`.
    pub words: Vec<Vec<usize>>,
    pub right_mul: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    pub dets: Vec<CycNum>,
    pub orders: Vec<usize>,
    pub reflections: Vec<usize>,
    pub hyperplanes: Vec<Hyperplane>,
    pub orbits: Vec<HyperplaneOrbit>,
    pub classes: Vec<ConjugacyClass>,
    pub class_of: Vec<usize>,
    pub degrees: Vec<usize>,
}

pub fn build_group(desc: &Descriptor) -> Result<ReflectionGroup, GroupError> {
    build_group_with_cap(desc, DEFAULT_MAX_ORDER)
}

pub fn build_group_with_cap(desc: &Descriptor, cap: usize) -> Result<ReflectionGroup, GroupError> {
    let (generators, gram, expected) = match desc {
        Descriptor::Sym(n) => {
            let order = (1..=*n).try_fold(1usize, |a, k| a.checked_mul(k));
            check_cap(order, cap)?;
            let (g, f) = symmetric_generators(*n);
            (g, f, order)
        }
        Descriptor::Imprimitive { m, p, n } => {
            let order = (1..=*n)
                .try_fold(1usize, |a, k| a.checked_mul(k))
                .and_then(|f| m.checked_pow(*n as u32).and_then(|mn| mn.checked_mul(f)))
                .map(|x| x / p);
            check_cap(order, cap)?;
            (imprimitive_generators(*m, *p, *n), Matrix::identity(*n), order)
        }
        Descriptor::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| GroupError::File(format!("{}: {e}", path.display())))?;
            let gens: Vec<Matrix> = serde_json::from_str(&text).map_err(|e| GroupError::File(e.to_string()))?;
            let dim = gens.first().map(Matrix::nrows).ok_or_else(|| GroupError::File("no generators".into()))?;
            if gens.iter().any(|g| g.nrows() != dim || g.ncols() != dim) || dim == 0 {
                return Err(GroupError::File("generators must be square of one size".into()));
            }
            (gens, Matrix::identity(dim), None)
        }
    };
    let g = ReflectionGroup::from_generators(desc.to_string(), generators, gram, cap)?;
    if let Some(e) = expected {
        if g.order() != e {
            return Err(GroupError::Internal(format!("enumerated {} elements, expected {e}", g.order())));
        }
    }
    Ok(g)
}

fn check_cap(order: Option<usize>, cap: usize) -> Result<(), GroupError> {
    match order {
        Some(o) if o <= cap => Ok(()),
        Some(o) => Err(GroupError::OrderCap(o.to_string(), cap)),
        None => Err(GroupError::OrderCap("overflow".into(), cap)),
    }
}

/// Sym(n) on `{Σ v_i = 0}` in the basis `e_i - e_{i+1}`, generated by the
/// adjacent transpositions, together with the invariant Gram form.
fn symmetric_generators(n: usize) -> (Vec<Matrix>, Matrix) {
    let r = n - 1;
    let mut gens = Vec::with_capacity(r);
    for j in 0..r {
        let mut m = Matrix::identity(r);
        // columns are images of basis vectors
        m[(j, j)] = CycNum::from_int(-1);
        if j > 0 {
            m[(j, j - 1)] = CycNum::one();
        }
        if j + 1 < r {
            m[(j, j + 1)] = CycNum::one();
        }
        gens.push(m);
    }
    let mut gram = Matrix::zeros(r, r);
    for i in 0..r {
        gram[(i, i)] = CycNum::from_int(2);
        if i + 1 < r {
            gram[(i, i + 1)] = CycNum::from_int(-1);
            gram[(i + 1, i)] = CycNum::from_int(-1);
        }
    }
    (gens, gram)
}

fn imprimitive_generators(m: usize, p: usize, n: usize) -> Vec<Matrix> {
    let zeta = |e: i64| CycNum::zeta(m as u32, e);
    let mut gens = Vec::new();
    if p < m {
        let mut t = Matrix::identity(n);
        t[(0, 0)] = zeta(p as i64);
        gens.push(t);
    }
    if n >= 2 && p > 1 {
        let mut s = Matrix::identity(n);
        s[(0, 0)] = CycNum::zero();
        s[(1, 1)] = CycNum::zero();
        s[(0, 1)] = zeta(-1);
        s[(1, 0)] = zeta(1);
        gens.push(s);
    }
    for i in 0..n.saturating_sub(1) {
        let mut s = Matrix::identity(n);
        s[(i, i)] = CycNum::zero();
        s[(i + 1, i + 1)] = CycNum::zero();
        s[(i, i + 1)] = CycNum::one();
        s[(i + 1, i)] = CycNum::one();
        gens.push(s);
    }
    gens
}

fn matrix_key(m: &Matrix, n: u32) -> Vec<u8> {
    let mut k = Vec::new();
    m.write_key(n, &mut k);
    k
}

impl ReflectionGroup {
    pub fn from_generators(
        descriptor: String,
        generators: Vec<Matrix>,
        gram: Matrix,
        cap: usize,
    ) -> Result<Self, GroupError> {
        let dim = gram.nrows();
        for (i, g) in generators.iter().enumerate() {
            if &(&g.conj_transpose() * &gram) * g != gram {
                return Err(GroupError::NonUnitary(i));
            }
        }
        let key_n = generators.iter().fold(1u32, |a, g| a.lcm(&g.conductor()));
        let ngen = generators.len();
        let gen_dets: Vec<CycNum> = generators.iter().map(Matrix::det).collect::<Result<_, _>>()?;

        // breadth-first enumeration by right multiplication
        let mut elements = vec![Matrix::identity(dim)];
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut dets = vec![CycNum::one()];
        let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
        index.insert(matrix_key(&elements[0], key_n), 0);
        let mut right_mul: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let mut row = Vec::with_capacity(ngen);
            for (gi, g) in generators.iter().enumerate() {
                let y = &elements[x] * g;
                let key = matrix_key(&y, key_n);
                let idx = match index.get(&key) {
                    Some(&i) => i,
                    None => {
                        let i = elements.len();
                        if i >= cap {
                            return Err(GroupError::OrderCap(format!("more than {i}"), cap));
                        }
                        index.insert(key, i);
                        let mut w = words[x].clone();
                        w.push(gi);
                        words.push(w);
                        dets.push(&dets[x] * &gen_dets[gi]);
                        elements.push(y);
                        queue.push_back(i);
                        i
                    }
                };
                row.push(idx);
            }
            right_mul.push(row);
        }

        let mut g = ReflectionGroup {
            descriptor,
            dim,
            gram,
            generators,
            conductor: key_n,
            exponent: 1,
            elements,
            words,
            right_mul,
            inverse: Vec::new(),
            dets,
            orders: Vec::new(),
            reflections: Vec::new(),
            hyperplanes: Vec::new(),
            orbits: Vec::new(),
            classes: Vec::new(),
            class_of: Vec::new(),
            degrees: Vec::new(),
        };
        g.compute_inverses_and_orders()?;
        g.conductor = key_n.lcm(&(g.exponent as u32));
        g.compute_reflections_and_orbits()?;
        g.check_generated_by_reflections()?;
        g.compute_classes();
        g.degrees = g.molien_degrees()?;
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Index of `a · b`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.words[b].iter().fold(a, |x, &g| self.right_mul[x][g])
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(0, |x, _| self.mul(x, a))
    }

    pub fn conjugate(&self, x: usize, by: usize) -> usize {
        self.mul(self.mul(self.inverse[by], x), by)
    }

    pub fn generator_index(&self, gi: usize) -> usize {
        self.right_mul[0][gi]
    }

    pub fn is_identity_index(&self, i: usize) -> bool {
        i == 0
    }

    fn compute_inverses_and_orders(&mut self) -> Result<(), GroupError> {
        let n = self.order();
        let gen_inv: Vec<usize> = (0..self.num_generators())
            .map(|gi| {
                let g = self.generator_index(gi);
                let mut x = g;
                let mut prev = 0;
                while x != 0 {
                    prev = x;
                    x = self.mul(x, g);
                }
                prev
            })
            .collect();
        self.inverse = (0..n)
            .map(|i| self.words[i].iter().rev().fold(0, |x, &g| self.mul(x, gen_inv[g])))
            .collect();
        for i in 0..n {
            if self.mul(i, self.inverse[i]) != 0 {
                return Err(GroupError::Internal(format!("bad inverse of element {i}")));
            }
        }
        self.orders = (0..n)
            .map(|i| {
                let mut k = 1;
                let mut x = i;
                while x != 0 {
                    x = self.mul(x, i);
                    k += 1;
                }
                k
            })
            .collect();
        self.exponent = self.orders.iter().fold(1, |a, &o| a.lcm(&o));
        Ok(())
    }

    fn compute_reflections_and_orbits(&mut self) -> Result<(), GroupError> {
        let id = Matrix::identity(self.dim);
        let mut by_normal: HashMap<Vec<u8>, usize> = HashMap::new();
        let mut hyperplanes: Vec<Hyperplane> = Vec::new();
        let key_n = self.conductor;
        for i in 1..self.order() {
            let d = &self.elements[i] - &id;
            let (r, pivots) = d.rref();
            if pivots.len() != 1 {
                continue;
            }
            self.reflections.push(i);
            // the single nonzero row of the echelon form is the normalized form
            let normal = r.row(0);
            let mut key = Vec::new();
            for x in &normal {
                x.promote(key_n).write_key(&mut key);
            }
            let h = *by_normal.entry(key).or_insert_with(|| {
                hyperplanes.push(Hyperplane {
                    alpha: MultiPoly::linear_form(&normal),
                    normal: normal.clone(),
                    order: 1,
                    distinguished: usize::MAX,
                    stabilizer: vec![0],
                    orbit: usize::MAX,
                });
                hyperplanes.len() - 1
            });
            hyperplanes[h].order += 1;
            hyperplanes[h].stabilizer.push(i);
        }
        for h in hyperplanes.iter_mut() {
            let target = CycNum::zeta(h.order as u32, 1);
            h.distinguished = *h
                .stabilizer
                .iter()
                .find(|&&w| self.dets[w] == target)
                .ok_or_else(|| GroupError::Internal("no distinguished reflection".into()))?;
        }

        // orbits: α ↦ α·g⁻¹ is the form of g(H)
        let gen_inverse_mats: Vec<Matrix> = self
            .generators
            .iter()
            .map(Matrix::inverse)
            .collect::<Result<_, _>>()?;
        let find = |row: &[CycNum]| -> Option<usize> {
            let lead = row.iter().find(|x| !x.is_zero())?.inv().ok()?;
            let mut key = Vec::new();
            for x in row {
                (x * &lead).promote(key_n).write_key(&mut key);
            }
            by_normal.get(&key).copied()
        };
        let mut orbits: Vec<HyperplaneOrbit> = Vec::new();
        for start in 0..hyperplanes.len() {
            if hyperplanes[start].orbit != usize::MAX {
                continue;
            }
            let oi = orbits.len();
            let mut members = vec![start];
            hyperplanes[start].orbit = oi;
            let mut k = 0;
            while k < members.len() {
                let h = members[k];
                k += 1;
                for ginv in &gen_inverse_mats {
                    let img = ginv.vec_mul(&hyperplanes[h].normal);
                    let j = find(&img).ok_or_else(|| GroupError::Internal("hyperplane image not found".into()))?;
                    if hyperplanes[j].orbit == usize::MAX {
                        hyperplanes[j].orbit = oi;
                        members.push(j);
                    }
                }
            }
            members.sort_unstable();
            let order = hyperplanes[start].order;
            if members.iter().any(|&h| hyperplanes[h].order != order) {
                return Err(GroupError::Internal("stabilizer orders differ within an orbit".into()));
            }
            let pi = members
                .iter()
                .fold(MultiPoly::one(self.dim), |acc, &h| &acc * &hyperplanes[h].alpha);
            let mut generator_character = Vec::new();
            for ginv in &gen_inverse_mats {
                let moved = pi.substitute_linear(ginv);
                let (e, c) = pi.leading().expect("nonzero product");
                let ratio = &moved.coeff(e) / c;
                if moved != pi.scale(&ratio) {
                    return Err(GroupError::Internal("orbit product is not semi-invariant".into()));
                }
                generator_character.push(ratio);
            }
            orbits.push(HyperplaneOrbit { members, order, pi, generator_character });
        }
        self.hyperplanes = hyperplanes;
        self.orbits = orbits;
        Ok(())
    }

    fn check_generated_by_reflections(&self) -> Result<(), GroupError> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut list = vec![0usize];
        let mut k = 0;
        while k < list.len() {
            let x = list[k];
            k += 1;
            for &r in &self.reflections {
                let y = self.mul(x, r);
                if !seen[y] {
                    seen[y] = true;
                    list.push(y);
                }
            }
        }
        if list.len() != self.order() {
            return Err(GroupError::NotReflectionGroup(list.len(), self.order()));
        }
        Ok(())
    }

    fn compute_classes(&mut self) {
        let n = self.order();
        let mut class_of = vec![usize::MAX; n];
        let gens: Vec<usize> = (0..self.num_generators()).map(|g| self.generator_index(g)).collect();
        let mut classes = Vec::new();
        for start in 0..n {
            if class_of[start] != usize::MAX {
                continue;
            }
            let ci = classes.len();
            class_of[start] = ci;
            let mut members = vec![start];
            let mut k = 0;
            while k < members.len() {
                let x = members[k];
                k += 1;
                for &g in &gens {
                    let y = self.conjugate(x, g);
                    if class_of[y] == usize::MAX {
                        class_of[y] = ci;
                        members.push(y);
                    }
                }
            }
            members.sort_unstable();
            classes.push(ConjugacyClass { representative: start, members });
        }
        self.classes = classes;
        self.class_of = class_of;
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(ConjugacyClass::size).collect()
    }

    /// Class of the inverse of each class.
    pub fn inverse_class(&self) -> Vec<usize> {
        self.classes.iter().map(|c| self.class_of[self.inverse[c.representative]]).collect()
    }

    /// Class of `x^k` for `x` in each class.
    pub fn power_class(&self, k: usize) -> Vec<usize> {
        self.classes.iter().map(|c| self.class_of[self.pow(c.representative, k)]).collect()
    }

    pub fn num_reflections(&self) -> usize {
        self.reflections.len()
    }

    /// `det(1 - T·w)` for an element.
    pub fn det_one_minus_t(&self, w: usize) -> PolyT {
        self.elements[w].det_one_minus_t()
    }

    /// Invariant degrees from the Molien series: invert the series, then
    /// peel factors `1 - T^d` from the lowest degree upward.
    pub fn molien_degrees(&self) -> Result<Vec<usize>, GroupError> {
        let order = self.num_reflections() + self.dim;
        let mut acc = SeriesT::new(Vec::new(), order);
        for c in &self.classes {
            let inv = SeriesT::inverse_of(&self.det_one_minus_t(c.representative), order)?;
            acc = &acc + &inv.scale(&CycNum::from_int(c.size() as i64));
        }
        let molien = acc.scale(&CycNum::from_frac(1, self.order() as i64));
        let mut rest = molien.inverse()?.to_poly();
        let mut degrees = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            let d = (1..=order)
                .find(|&k| !rest.coeff(k).is_zero())
                .ok_or_else(|| GroupError::Degrees("ran out of factors".into()))?;
            rest = rest
                .divide_exact(&PolyT::one_minus_t_pow(d))
                .map_err(|_| GroupError::Degrees(format!("1 - T^{d} does not divide")))?;
            degrees.push(d);
        }
        if rest != PolyT::one() {
            return Err(GroupError::Degrees(format!("leftover factor {rest}")));
        }
        Ok(degrees)
    }

    /// `χ_C` of an orbit product as a class function.
    pub fn orbit_character(&self, orbit: usize) -> Vec<CycNum> {
        let vals = &self.orbits[orbit].generator_character;
        self.classes
            .iter()
            .map(|c| {
                self.words[c.representative]
                    .iter()
                    .fold(CycNum::one(), |acc, &g| &acc * &vals[g])
            })
            .collect()
    }

    /// Whether every generator is the distinguished reflection of its
    /// hyperplane.
    pub fn generators_are_distinguished(&self) -> bool {
        (0..self.num_generators()).all(|gi| self.hyperplane_of_generator(gi).is_some())
    }

    pub fn hyperplane_of_generator(&self, gi: usize) -> Option<usize> {
        let idx = self.generator_index(gi);
        self.hyperplanes.iter().position(|h| h.distinguished == idx)
    }

    /// `d_i - 1`.
    pub fn coexponents_sum(&self) -> usize {
        self.degrees.iter().map(|d| d - 1).sum()
    }
}
