//! One function per subcommand, each returning its JSON payload.

use std::fmt::Write as _;
use std::path::Path;

use num::complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use reflekt::chars::{character_table, local_data, CharacterTable};
use reflekt::exact::{CycNum, Matrix, PolyT};
use reflekt::fake::{self,
    degree_product, palindrome_check, poincare_identity, verify_pn_identity, FakeContext,
    FakeDegree,
};
use reflekt::group::{build_group_with_cap, Descriptor, ReflectionGroup};
use reflekt::kz::{
    euler_scalar, gamma_permutation, monodromy_for_row, CMat, LabelVector, GAMMA_CONVENTION,
};
use reflekt::minmat::{
    build_minimal_matrix, sample_non_minimal, verify_det_factorization, verify_equivariance, verify_euler,
    verify_quotient_property, DEFAULT_SEED as MINMAT_SEED,
};
use reflekt::ALGORITHM_VERSION;

use crate::cache::{cache_key, cached};
use crate::{compute_err, CliError, Ctx, Outcome};

struct Loaded {
    group: ReflectionGroup,
    /// Canonical descriptor used in cache keys; file groups are keyed by content.
    canonical: String,
}

fn load(ctx: &Ctx, descriptor: &str) -> Result<Loaded, CliError> {
    let desc: Descriptor = descriptor.parse()?;
    let canonical = match &desc {
        Descriptor::File(path) => {
            let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            format!("file-sha256:{}", hex::encode(Sha256::digest(&bytes)))
        }
        other => other.to_string(),
    };
    let group = build_group_with_cap(&desc, ctx.max_order)?;
    Ok(Loaded { group, canonical })
}

fn table(ctx: &Ctx, l: &Loaded) -> Result<CharacterTable, CliError> {
    let key = cache_key(&l.canonical, ALGORITHM_VERSION, "chars");
    cached(ctx.cache.as_ref(), &key, |t: &CharacterTable| t.is_valid_for(&l.group), || {
        character_table(&l.group).map_err(compute_err)
    })
}

fn fake_degrees(ctx: &Ctx, l: &Loaded, t: &CharacterTable) -> Result<Vec<FakeDegree>, CliError> {
    let key = cache_key(&l.canonical, ALGORITHM_VERSION, "fake");
    let valid = |f: &Vec<FakeDegree>| fake_list_valid(&l.group, t, f);
    cached(ctx.cache.as_ref(), &key, valid, || {
        Ok(FakeContext::new(&l.group, t).map_err(compute_err)?.fake_degrees().to_vec())
    })
}

/// Natural coefficients, `F(1) = deg τ`, consistent exponents and the
/// Poincaré identity.
fn fake_list_valid(g: &ReflectionGroup, t: &CharacterTable, f: &[FakeDegree]) -> bool {
    if f.len() != t.len() {
        return false;
    }
    let mut sum = PolyT::zero();
    for (row, fd) in t.rows.iter().zip(f) {
        if !fd.polynomial.has_nonneg_integer_coeffs()
            || fd.polynomial.eval(&CycNum::one()) != row.degree()
            || fd.polynomial.exponents().as_ref() != Some(&fd.exponents)
        {
            return false;
        }
        sum = &sum + &fd.polynomial.scale(&row.degree());
    }
    let mut rhs = degree_product(g);
    for _ in 0..g.dim {
        match rhs.divide_exact(&PolyT::from_ints(&[1, -1])) {
            Ok(q) => rhs = q,
            Err(_) => return false,
        }
    }
    sum == rhs
}

fn cyc(x: &CycNum) -> Value {
    Value::String(x.to_string())
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(cyc).collect())).collect())
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cmat_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect()))
            .collect(),
    )
}

fn to_value(x: &impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(compute_err)
}

fn check_rep(t: &CharacterTable, rep: usize) -> Result<(), CliError> {
    if rep >= t.len() {
        return Err(CliError::Input(format!("--rep {rep} out of range: the table has {} rows", t.len())));
    }
    Ok(())
}

pub fn group_info(ctx: &Ctx, descriptor: &str) -> Result<Outcome, CliError> {
    let l = load(ctx, descriptor)?;
    let g = &l.group;
    let product: usize = g.degrees.iter().product();
    let exponent_sum: usize = g.degrees.iter().map(|d| d - 1).sum();
    let checks = json!({
        "degree_product_is_order": product == g.order(),
        "exponent_sum_is_reflection_count": exponent_sum == g.num_reflections(),
    });
    let pass = product == g.order() && exponent_sum == g.num_reflections();
    let orbits: Vec<Value> = g
        .orbits
        .iter()
        .map(|o| json!({"hyperplanes": o.members.len(), "stabilizer_order": o.order}))
        .collect();
    let result = json!({
        "descriptor": g.descriptor.to_string(),
        "rank": g.dim,
        "order": g.order(),
        "degrees": g.degrees,
        "reflections": g.num_reflections(),
        "hyperplanes": g.hyperplanes.len(),
        "hyperplane_orbits": orbits,
        "classes": g.classes.len(),
        "conductor": g.conductor,
        "coexponent_sum": g.coexponents_sum(),
        "generators": g.generators.iter().map(matrix_json).collect::<Vec<_>>(),
        "checks": checks,
    });
    Ok(Outcome { result, pass })
}

pub fn chars(ctx: &Ctx, descriptor: &str) -> Result<Outcome, CliError> {
    let l = load(ctx, descriptor)?;
    let g = &l.group;
    let t = table(ctx, &l)?;
    let classes: Vec<Value> = g
        .classes
        .iter()
        .map(|c| json!({"size": c.size(), "word": g.words[c.representative], "element_order": g.orders[c.representative]}))
        .collect();
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| json!({"degree": r.degree_usize(), "values": r.values.iter().map(cyc).collect::<Vec<_>>()}))
        .collect();
    let rows_ok = t.rows_orthonormal(g);
    let cols_ok = t.columns_orthogonal(g);
    let result = json!({
        "classes": classes,
        "rows": rows,
        "checks": {"rows_orthonormal": rows_ok, "columns_orthogonal": cols_ok},
    });
    Ok(Outcome { result, pass: rows_ok && cols_ok })
}

pub fn fake(ctx: &Ctx, descriptor: &str, csv: Option<&Path>) -> Result<Outcome, CliError> {
    let l = load(ctx, descriptor)?;
    let t = table(ctx, &l)?;
    let fakes = fake_degrees(ctx, &l, &t)?;
    let degrees = t.degrees();
    let rows: Vec<Value> = fakes
        .iter()
        .enumerate()
        .map(|(i, f)| {
            json!({
                "row": i,
                "degree": degrees[i],
                "fake_degree": f.polynomial.to_string(),
                "coefficients": f.coefficients(),
                "exponents": f.exponents,
            })
        })
        .collect();
    if let Some(path) = csv {
        let width = fakes.iter().map(|f| f.coefficients().len()).max().unwrap_or(0);
        let mut out = String::from("row,degree");
        for k in 0..width {
            let _ = write!(out, ",T^{k}");
        }
        out.push('\n');
        for (i, f) in fakes.iter().enumerate() {
            let mut c = f.coefficients();
            c.resize(width, 0);
            let cells: Vec<String> = c.iter().map(i64::to_string).collect();
            let _ = writeln!(out, "{i},{},{}", degrees[i], cells.join(","));
        }
        std::fs::write(path, out)?;
    }
    let pass = fake_list_valid(&l.group, &t, &fakes);
    Ok(Outcome { result: json!({"rows": rows}), pass })
}

fn with_context<T>(ctx: &Ctx, descriptor: &str, f: impl FnOnce(&FakeContext) -> Result<T, CliError>) -> Result<T, CliError> {
    let l = load(ctx, descriptor)?;
    let t = table(ctx, &l)?;
    let fc = FakeContext::new(&l.group, &t).map_err(compute_err)?;
    f(&fc)
}

pub fn verify_pn(ctx: &Ctx, descriptor: &str) -> Result<Outcome, CliError> {
    with_context(ctx, descriptor, |fc| {
        let items = (0..fc.table.len())
            .map(|r| verify_pn_identity(fc, r).map_err(compute_err))
            .collect::<Result<Vec<_>, _>>()?;
        let pass = items.iter().all(|x| x.pass);
        Ok(Outcome { result: json!({"identity": "pn", "items": to_value(&items)?}), pass })
    })
}

pub fn verify_symmetry(ctx: &Ctx, descriptor: &str) -> Result<Outcome, CliError> {
    with_context(ctx, descriptor, |fc| {
        let items = fake::verify_symmetry(fc).map_err(compute_err)?;
        let pass = items.iter().all(|x| x.pass);
        Ok(Outcome { result: json!({"identity": "symmetry", "items": to_value(&items)?}), pass })
    })
}

pub fn verify_palindrome(ctx: &Ctx, descriptor: &str) -> Result<Outcome, CliError> {
    with_context(ctx, descriptor, |fc| {
        let items = palindrome_check(fc).map_err(compute_err)?;
        let pass = items.iter().all(|x| x.pass);
        Ok(Outcome { result: json!({"identity": "palindrome", "items": to_value(&items)?}), pass })
    })
}

pub fn verify_poincare(ctx: &Ctx, descriptor: &str) -> Result<Outcome, CliError> {
    with_context(ctx, descriptor, |fc| {
        let report = poincare_identity(fc).map_err(compute_err)?;
        let pass = report.pass;
        Ok(Outcome { result: json!({"identity": "poincare", "report": to_value(&report)?}), pass })
    })
}

pub fn minmat(ctx: &Ctx, descriptor: &str, rep: Option<usize>) -> Result<Outcome, CliError> {
    let l = load(ctx, descriptor)?;
    let g = &l.group;
    let t = table(ctx, &l)?;
    let fakes = fake_degrees(ctx, &l, &t)?;
    let rows: Vec<usize> = match rep {
        Some(r) => {
            check_rep(&t, r)?;
            vec![r]
        }
        None => (0..t.len()).collect(),
    };
    let seed = ctx.seed.unwrap_or(MINMAT_SEED);
    let mut pass = true;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mm = build_minimal_matrix(g, &t, row, &fakes[row], seed).map_err(compute_err)?;
        let equivariant = verify_equivariance(g, &mm).map_err(compute_err)?;
        let euler = verify_euler(&mm);
        let det = verify_det_factorization(g, &t, &mm).map_err(compute_err)?;
        let (n, degrees) = sample_non_minimal(g, &mm, &fakes[row], seed).map_err(compute_err)?;
        let quotient = verify_quotient_property(g, &mm, &n, degrees).map_err(compute_err)?;
        pass &= equivariant && euler && det.pass && quotient.pass;
        let entries: Vec<Value> = mm
            .entries
            .iter()
            .map(|r| Value::Array(r.iter().map(|f| Value::String(f.to_string())).collect()))
            .collect();
        out.push(json!({
            "row": row,
            "column_degrees": mm.column_degrees,
            "entries": entries,
            "det": mm.det.to_string(),
            "checks": {
                "equivariance": equivariant,
                "euler": euler,
                "det_factorization": to_value(&det)?,
                "quotient": to_value(&quotient)?,
            },
        }));
    }
    Ok(Outcome { result: json!({"seed": seed, "matrices": out}), pass })
}

fn parse_labels(g: &ReflectionGroup, k: &str) -> Result<LabelVector, CliError> {
    let v: Value = serde_json::from_str(k).map_err(|e| CliError::Input(format!("--k is not JSON: {e}")))?;
    Ok(LabelVector::from_json(g, &v)?)
}

fn base_point_json(b: &reflekt::kz::BasePoint) -> Value {
    json!({
        "point": b.point.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
        "margin": b.margin,
        "seed": b.seed,
        "attempts": b.attempts,
        "path_radii": b.paths.iter().map(|p| p.radius).collect::<Vec<_>>(),
    })
}

pub fn kz_monodromy(ctx: &Ctx, descriptor: &str, rep: usize, k: &str) -> Result<Outcome, CliError> {
    let l = load(ctx, descriptor)?;
    let g = &l.group;
    let t = table(ctx, &l)?;
    check_rep(&t, rep)?;
    let labels = parse_labels(g, k)?;
    let (block, m) = monodromy_for_row(g, &t, rep, &labels, &ctx.kz)?;
    let s = euler_scalar(g, &t.rows[rep], &labels)?;
    let local = local_data(&t.rows[rep], g).map_err(compute_err)?;
    let gens: Vec<Value> = m
        .generators
        .iter()
        .map(|x| {
            json!({
                "generator": x.generator,
                "hyperplane": x.hyperplane,
                "orbit": x.orbit,
                "stabilizer_order": x.order,
                "matrix": cmat_json(&x.matrix),
                "action": cmat_json(&x.action),
                "hecke_residual": x.hecke_residual,
                "det_residual": x.det_residual,
                "calibration_residual": x.calibration_residual,
                "steps": x.steps,
            })
        })
        .collect();
    let pass = m.generators.iter().all(|x| x.hecke_residual <= 1e-6 && x.det_residual <= 1e-6);
    let result = json!({
        "row": rep,
        "labels": labels.to_json(),
        "local_data": local.n,
        "euler_scalar": complex_json(s),
        "curvature": block.curvature,
        "tolerance": m.tolerance,
        "base": base_point_json(&m.base),
        "convention": "matrix = tau(s_H)^-1 U_H with U_H the transport along v0 -> s_H v0; action = matrix^-1 is the braid generator on solutions and equals tau(s_H) at k = 0",
        "generators": gens,
    });
    Ok(Outcome { result, pass })
}

pub fn kz_gamma(ctx: &Ctx, descriptor: &str, k: &str) -> Result<Outcome, CliError> {
    let l = load(ctx, descriptor)?;
    let g = &l.group;
    let t = table(ctx, &l)?;
    let labels = parse_labels(g, k)?;
    let r = gamma_permutation(g, &t, &labels, &ctx.kz)?;
    let certificates: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            json!({
                "row": e.row,
                "image": e.image,
                "distance": e.distance,
                "runner_up": e.runner_up,
                "pure_braid_residual": e.pure_braid_residual,
                "hecke_residual": e.hecke_residual,
                "tolerance": e.tolerance,
            })
        })
        .collect();
    let pairs: Vec<[usize; 2]> = r.permutation.iter().enumerate().map(|(i, &j)| [i, j]).collect();
    let result = json!({
        "labels": labels.to_json(),
        "convention": GAMMA_CONVENTION,
        "pairs": pairs,
        "certificates": certificates,
        "base": base_point_json(&r.base),
    });
    Ok(Outcome { result, pass: true })
}
