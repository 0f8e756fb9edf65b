//! Reference computations that share nothing with the library beyond the
//! group elements themselves.

use nalgebra::{DMatrix, SymmetricEigen};
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reflekt::exact::{CycNum, PolyT};
use reflekt::group::ReflectionGroup;

/// `det(I − T·M)` by cofactor expansion over polynomial entries.
pub fn det_one_minus_t(m: &reflekt::exact::Matrix) -> Vec<CycNum> {
    let n = m.nrows();
    let entries: Vec<Vec<PolyT>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let delta = if i == j { CycNum::one() } else { CycNum::zero() };
                    PolyT::new(vec![delta, -&m[(i, j)]])
                })
                .collect()
        })
        .collect();
    laplace(&entries).coeffs().to_vec()
}

fn laplace(m: &[Vec<PolyT>]) -> PolyT {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = PolyT::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<PolyT>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][j] * &laplace(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// First `order + 1` coefficients of `num / den` by long division; `den(0) = 1`.
pub fn series_quotient(num: &[CycNum], den: &[CycNum], order: usize) -> Vec<CycNum> {
    assert!(den[0].is_one());
    let mut out = vec![CycNum::zero(); order + 1];
    for k in 0..=order {
        let mut c = num.get(k).cloned().unwrap_or_else(CycNum::zero);
        for i in 1..=k.min(den.len() - 1) {
            c -= &(&den[i] * &out[k - i]);
        }
        out[k] = c;
    }
    out
}

fn poly_product(a: &[CycNum], b: &[CycNum]) -> Vec<CycNum> {
    let mut out = vec![CycNum::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += &(x * y);
        }
    }
    out
}

/// `(1/|W|) Σ_w χ(w) Π(1 − T^{d_i}) / det(1 − T w)` over every element,
/// truncated after degree `order`.
pub fn brute_fake_degree(g: &ReflectionGroup, chi: &[CycNum], degrees: &[usize], order: usize) -> Vec<CycNum> {
    let mut numer = vec![CycNum::one()];
    for &d in degrees {
        let mut f = vec![CycNum::zero(); d + 1];
        f[0] = CycNum::one();
        f[d] = CycNum::from_int(-1);
        numer = poly_product(&numer, &f);
    }
    let mut acc = vec![CycNum::zero(); order + 1];
    for (w, m) in g.elements.iter().enumerate() {
        let c = &chi[g.class_of[w]];
        if c.is_zero() {
            continue;
        }
        let s = series_quotient(&numer, &det_one_minus_t(m), order);
        for k in 0..=order {
            acc[k] += &(c * &s[k]);
        }
    }
    let inv = CycNum::from_frac(1, g.order() as i64);
    acc.iter().map(|x| x * &inv).collect()
}

/// Molien series `(1/|W|) Σ_w 1/det(1 − T w)` up to degree `order`.
pub fn brute_molien(g: &ReflectionGroup, order: usize) -> Vec<CycNum> {
    let ones: Vec<CycNum> = vec![CycNum::one(); g.classes.len()];
    brute_fake_degree(g, &ones, &[], order)
}

/// Coefficients of `Π 1/(1 − T^{d_i})` by counting solutions of `Σ a_i d_i = k`.
pub fn free_algebra_series(degrees: &[usize], order: usize) -> Vec<i64> {
    let mut c = vec![0i64; order + 1];
    c[0] = 1;
    for &d in degrees {
        for k in d..=order {
            c[k] += c[k - d];
        }
    }
    c
}

/// Irreducible characters from the isotypic decomposition of the regular
/// representation, via one Hermitian element of the centre.
pub fn regular_characters(g: &ReflectionGroup, seed: u64) -> Vec<Vec<Complex64>> {
    let n = g.order();
    let left = |x: usize| -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(n, n);
        for y in 0..n {
            m[(g.mul(x, y), y)] = Complex64::new(1.0, 0.0);
        }
        m
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for c in &g.classes {
        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mut sum = DMatrix::<Complex64>::zeros(n, n);
        for &x in &c.members {
            sum += left(x);
        }
        let adj = sum.adjoint();
        h += (&sum + &adj) * Complex64::new(a, 0.0) + (&sum - &adj) * Complex64::new(0.0, b);
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(cl) if (eig.eigenvalues[i] - eig.eigenvalues[*cl.last().unwrap()]).abs() < 1e-6 => cl.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    let reps: Vec<DMatrix<Complex64>> = g.classes.iter().map(|c| left(c.representative)).collect();
    clusters
        .iter()
        .map(|cl| {
            let v = DMatrix::from_columns(&cl.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
            let p = &v * v.adjoint();
            let d = (cl.len() as f64).sqrt();
            assert!((d - d.round()).abs() < 1e-9, "isotypic block of non-square size {}", cl.len());
            reps.iter().map(|l| (l * &p).trace() / d).collect()
        })
        .collect()
}

/// `n[c][j] = (1/e) Σ_{w ∈ Stab(H)} χ(w) det(w)^j` for one hyperplane per orbit.
pub fn local_data(g: &ReflectionGroup, chi: &[CycNum]) -> Vec<Vec<i64>> {
    g.orbits
        .iter()
        .map(|o| {
            let h = &g.hyperplanes[o.members[0]];
            (0..o.order)
                .map(|j| {
                    let mut acc = CycNum::zero();
                    for &w in &h.stabilizer {
                        let mut d = CycNum::one();
                        for _ in 0..j {
                            d = &d * &g.dets[w];
                        }
                        acc += &(&chi[g.class_of[w]] * &d);
                    }
                    (&acc * &CycNum::from_frac(1, o.order as i64)).as_i64().expect("integral multiplicity")
                })
                .collect()
        })
        .collect()
}

/// Elements whose fixed space is a hyperplane: `w − I` has rank one.
pub fn reflections(g: &ReflectionGroup) -> Vec<usize> {
    (0..g.order())
        .filter(|&w| {
            let m = &g.elements[w];
            let n = m.nrows();
            let a = |i: usize, j: usize| if i == j { &m[(i, j)] - &CycNum::one() } else { m[(i, j)].clone() };
            let nonzero = (0..n).any(|i| (0..n).any(|j| !a(i, j).is_zero()));
            let minors_vanish = (0..n).all(|i| {
                (0..n).all(|k| {
                    (0..n).all(|j| (0..n).all(|l| (&(&a(i, j) * &a(k, l)) - &(&a(i, l) * &a(k, j))).is_zero()))
                })
            });
            nonzero && minors_vanish
        })
        .collect()
}

/// Integer coefficients with trailing zeros removed.
pub fn integer_poly(c: &[CycNum]) -> Option<Vec<i64>> {
    let mut v: Vec<i64> = c.iter().map(CycNum::as_i64).collect::<Option<_>>()?;
    while v.last() == Some(&0) {
        v.pop();
    }
    Some(v)
}
