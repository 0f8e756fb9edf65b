//! Fake degrees, graded characters of the coinvariant algebra, and the
//! identities relating them to restriction data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chars::{det_character, local_data, tensor_with_linear, CharError, CharacterTable, ClassFunction, LocalData};
use crate::exact::{CycNum, ExactError, PolyT, Rational, SeriesT};
use crate::group::ReflectionGroup;

#[derive(Debug, Error)]
pub enum FakeError {
    #[error("fake degree of row {0} is not a nonnegative integer polynomial: {1}")]
    NotNatural(usize, String),
    #[error("fake degree of row {0} has value {1} at T = 1, expected the degree")]
    WrongDimension(usize, String),
    #[error("coinvariant identity failed: {0}")]
    Identity(String),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FakeDegree {
    pub polynomial: PolyT,
    pub exponents: Vec<usize>,
}

impl FakeDegree {
    pub fn coefficients(&self) -> Vec<i64> {
        self.polynomial.coeffs().iter().map(|c| c.as_i64().expect("integer coefficient")).collect()
    }
}

/// `Π (1 - T^{d_i})`.
pub fn degree_product(g: &ReflectionGroup) -> PolyT {
    g.degrees.iter().fold(PolyT::one(), |acc, &d| &acc * &PolyT::one_minus_t_pow(d))
}

/// `Π(1 - T^{d_i}) / det(1 - T w⁻¹)` truncated at `order`.
pub fn graded_character(g: &ReflectionGroup, w: usize, order: usize) -> Result<SeriesT, FakeError> {
    let inv = SeriesT::inverse_of(&g.det_one_minus_t(g.inverse[w]), order)?;
    Ok(inv.mul_poly(&degree_product(g)))
}

/// Per-class series `Π(1 - T^{d_i}) / det(1 - T w)` to order `#R`.
pub struct FakeContext<'a> {
    pub group: &'a ReflectionGroup,
    pub table: &'a CharacterTable,
    class_series: Vec<SeriesT>,
    /// Whether the conjugate convention was needed for some row.
    pub conjugate_rows: Vec<usize>,
    fakes: Vec<FakeDegree>,
}

impl<'a> FakeContext<'a> {
    pub fn new(group: &'a ReflectionGroup, table: &'a CharacterTable) -> Result<Self, FakeError> {
        let order = group.num_reflections();
        let prod = degree_product(group);
        let class_series = group
            .classes
            .iter()
            .map(|c| Ok(SeriesT::inverse_of(&group.det_one_minus_t(c.representative), order)?.mul_poly(&prod)))
            .collect::<Result<Vec<_>, FakeError>>()?;
        let mut ctx = FakeContext { group, table, class_series, conjugate_rows: Vec::new(), fakes: Vec::new() };
        let mut fakes = Vec::with_capacity(table.len());
        for (i, row) in table.rows.iter().enumerate() {
            let f = match ctx.fake_degree_of(row, false) {
                Ok(f) => f,
                Err(first) => {
                    ctx.conjugate_rows.push(i);
                    ctx.fake_degree_of(row, true).map_err(|_| match first {
                        FakeError::NotNatural(_, s) => FakeError::NotNatural(i, s),
                        FakeError::WrongDimension(_, s) => FakeError::WrongDimension(i, s),
                        other => other,
                    })?
                }
            };
            fakes.push(f);
        }
        ctx.fakes = fakes;
        Ok(ctx)
    }

    pub fn fake_degrees(&self) -> &[FakeDegree] {
        &self.fakes
    }

    pub fn fake(&self, row: usize) -> &FakeDegree {
        &self.fakes[row]
    }

    /// `R_τ = F_{conj τ}`.
    pub fn r_poly(&self, row: usize) -> &PolyT {
        let c = self.table.find(&self.table.rows[row].conj()).expect("conjugate row exists");
        &self.fakes[c].polynomial
    }

    fn raw_sum(&self, chi: &ClassFunction, conjugate: bool) -> PolyT {
        let g = self.group;
        let inv_class = g.inverse_class();
        let order = g.num_reflections();
        let mut acc = SeriesT::new(Vec::new(), order);
        for (ci, c) in g.classes.iter().enumerate() {
            if chi.values[ci].is_zero() {
                continue;
            }
            let s = if conjugate { &self.class_series[inv_class[ci]] } else { &self.class_series[ci] };
            let w = &chi.values[ci] * &CycNum::from_int(c.size() as i64);
            acc = &acc + &s.scale(&w);
        }
        acc.scale(&CycNum::from_frac(1, g.order() as i64)).to_poly()
    }

    /// Fake degree of an arbitrary character (sum over constituents).
    pub fn fake_degree(&self, chi: &ClassFunction) -> Result<FakeDegree, FakeError> {
        self.fake_degree_of(chi, false)
    }

    fn fake_degree_of(&self, chi: &ClassFunction, conjugate: bool) -> Result<FakeDegree, FakeError> {
        let p = self.raw_sum(chi, conjugate);
        if !p.has_nonneg_integer_coeffs() {
            return Err(FakeError::NotNatural(usize::MAX, p.to_string()));
        }
        let at_one = p.eval(&CycNum::one());
        if at_one != chi.degree() {
            return Err(FakeError::WrongDimension(usize::MAX, at_one.to_string()));
        }
        let exponents = p.exponents().expect("natural coefficients");
        Ok(FakeDegree { polynomial: p, exponents })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PnItem {
    pub rep: usize,
    pub exponent_sum: usize,
    pub local_sum: usize,
    pub pass: bool,
}

/// `Σ p_j = Σ_C |C| Σ_j j·n_{C,j}` for one row.
pub fn verify_pn_identity(ctx: &FakeContext, row: usize) -> Result<PnItem, FakeError> {
    let lhs: usize = ctx.fake(row).exponents.iter().sum();
    let rhs = local_data(&ctx.table.rows[row], ctx.group)?.weighted_sum(ctx.group);
    Ok(PnItem { rep: row, exponent_sum: lhs, local_sum: rhs, pass: lhs == rhs })
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareReport {
    pub weighted_sum: Vec<i64>,
    pub coinvariant: Vec<i64>,
    pub pass: bool,
}

/// `Σ_τ deg τ · F_τ = Π(1 - T^{d_i}) / (1 - T)^n`.
pub fn poincare_identity(ctx: &FakeContext) -> Result<PoincareReport, FakeError> {
    let g = ctx.group;
    let mut lhs = PolyT::zero();
    for (row, f) in ctx.table.rows.iter().zip(ctx.fake_degrees()) {
        lhs = &lhs + &f.polynomial.scale(&row.degree());
    }
    let rhs = graded_character(g, 0, g.num_reflections())?.to_poly();
    let ints = |p: &PolyT| -> Vec<i64> { p.coeffs().iter().map(|c| c.as_i64().unwrap_or(i64::MIN)).collect() };
    Ok(PoincareReport { weighted_sum: ints(&lhs), coinvariant: ints(&rhs), pass: lhs == rhs })
}

/// `N(τ, b) = Σ_C |C| Σ_{j < b_C} (e_C n_{C,j} / deg τ - 1)`.
pub fn symmetry_shift(g: &ReflectionGroup, local: &LocalData, degree: usize, b: &[usize]) -> Rational {
    let mut acc = Rational::from_integer(0.into());
    for ((o, n), &bc) in g.orbits.iter().zip(&local.n).zip(b) {
        for &m in n.iter().take(bc) {
            let term = Rational::new(((o.order * m) as i64).into(), (degree as i64).into()) - Rational::from_integer(1.into());
            acc += term * Rational::from_integer((o.members.len() as i64).into());
        }
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryItem {
    pub rep: usize,
    pub b: Vec<usize>,
    pub shift: String,
    pub integral: bool,
    pub matches: Vec<usize>,
    /// Per match: whether its restriction data equals that of τ twisted by
    /// the inverse of `Π_C χ_C^{b_C}`.
    pub local_data_twisted: Vec<bool>,
    pub pass: bool,
}

/// All vectors `b` with `0 <= b_C < e_C`.
pub fn b_vectors(g: &ReflectionGroup) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for o in &g.orbits {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..o.order).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

/// `Π_C χ_C^{b_C}`.
pub fn orbit_twist(g: &ReflectionGroup, b: &[usize]) -> ClassFunction {
    let mut acc = ClassFunction::trivial(g);
    for (oi, &bc) in b.iter().enumerate() {
        let chi = ClassFunction::new(g.orbit_character(oi));
        for _ in 0..bc {
            acc = acc.product(&chi);
        }
    }
    acc
}

pub fn verify_symmetry(ctx: &FakeContext) -> Result<Vec<SymmetryItem>, FakeError> {
    let g = ctx.group;
    let mut items = Vec::new();
    let locals: Vec<LocalData> = ctx.table.rows.iter().map(|r| local_data(r, g)).collect::<Result<_, _>>()?;
    let degrees = ctx.table.degrees();
    for row in 0..ctx.table.len() {
        for b in b_vectors(g) {
            let shift = symmetry_shift(g, &locals[row], degrees[row], &b);
            let integral = shift.is_integer();
            let mut matches = Vec::new();
            let mut twisted = Vec::new();
            if integral {
                let k: i64 = num::ToPrimitive::to_i64(&shift.to_integer()).expect("small shift");
                if let Some(target) = ctx.fake(row).polynomial.shift(k) {
                    let twist = orbit_twist(g, &b).conj();
                    let expect_local = local_data(&tensor_with_linear(&ctx.table.rows[row], &twist)?, g)?;
                    for cand in 0..ctx.table.len() {
                        if degrees[cand] == degrees[row] && ctx.fake(cand).polynomial == target {
                            matches.push(cand);
                            twisted.push(locals[cand] == expect_local);
                        }
                    }
                }
            }
            let pass = integral && !matches.is_empty();
            items.push(SymmetryItem {
                rep: row,
                b,
                shift: shift.to_string(),
                integral,
                matches,
                local_data_twisted: twisted,
                pass,
            });
        }
    }
    Ok(items)
}

#[derive(Clone, Debug, Serialize)]
pub struct PalindromeItem {
    pub rep: usize,
    /// Row of τ ⊗ det.
    pub tensor_det: usize,
    /// `T^{#R} R_τ(T⁻¹) = F_{τ⊗det}`.
    pub reflection_identity: bool,
    pub c: String,
    pub partners: Vec<usize>,
    pub pass: bool,
}

pub fn palindrome_check(ctx: &FakeContext) -> Result<Vec<PalindromeItem>, FakeError> {
    let g = ctx.group;
    let det = det_character(g);
    let nr = g.num_reflections();
    let degrees = ctx.table.degrees();
    let mut refl_by_class: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in &g.reflections {
        *refl_by_class.entry(g.class_of[r]).or_default() += 1;
    }
    let mut items = Vec::new();
    for row in 0..ctx.table.len() {
        let chi = &ctx.table.rows[row];
        let td = ctx
            .table
            .find(&tensor_with_linear(chi, &det)?)
            .ok_or_else(|| FakeError::Identity("τ ⊗ det is not a row".into()))?;
        let r = ctx.r_poly(row);
        let reflected = r.reflect(nr);
        let identity = reflected.as_ref() == Some(&ctx.fake(td).polynomial);
        if !identity {
            return Err(FakeError::Identity(format!("row {row}: T^#R R(1/T) differs from F of τ⊗det")));
        }

        let mut s = CycNum::zero();
        for (&cl, &count) in &refl_by_class {
            s += &(&chi.values[cl] * &CycNum::from_int(count as i64));
        }
        let c = &CycNum::from_int(nr as i64) - &(&s / &chi.degree());
        let mut partners = Vec::new();
        let c_int = c.as_i64().filter(|&x| x >= 0);
        if let Some(ci) = c_int {
            if let Some(target) = r.reflect(ci as usize) {
                for cand in 0..ctx.table.len() {
                    if degrees[cand] == degrees[row] && *ctx.r_poly(cand) == target {
                        partners.push(cand);
                    }
                }
            }
        }
        items.push(PalindromeItem {
            rep: row,
            tensor_det: td,
            reflection_identity: identity,
            c: c.to_string(),
            pass: c_int.is_some() && !partners.is_empty(),
            partners,
        });
    }
    Ok(items)
}
