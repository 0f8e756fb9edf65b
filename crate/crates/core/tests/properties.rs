mod common;

use num::complex::Complex64;
use proptest::prelude::*;
use reflekt::exact::{CycNum, Matrix, MultiPoly, PolyT, SeriesT};

fn cyc(n: u32) -> impl Strategy<Value = CycNum> {
    prop::collection::vec((-6i64..=6, 1i64..=4), n as usize).prop_map(move |cs| {
        let mut acc = CycNum::zero();
        for (e, (num, den)) in cs.into_iter().enumerate() {
            acc += &(&CycNum::from_frac(num, den) * &CycNum::zeta(n, e as i64));
        }
        acc
    })
}

fn conductor_and_triple() -> impl Strategy<Value = (u32, CycNum, CycNum, CycNum)> {
    (1u32..=24).prop_flat_map(|n| (Just(n), cyc(n), cyc(n), cyc(n)))
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn field_axioms((_n, a, b, c) in conductor_and_triple()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn embedding_is_a_ring_map((_n, a, b, _c) in conductor_and_triple()) {
        prop_assert!(close((&a * &b).to_complex(), a.to_complex() * b.to_complex()));
        prop_assert!(close((&a + &b).to_complex(), a.to_complex() + b.to_complex()));
    }

    #[test]
    fn conjugation((_n, a, b, _c) in conductor_and_triple()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        let norm = (&a * &a.conj()).to_complex();
        prop_assert!(norm.im.abs() <= 1e-12 * (1.0 + norm.re.abs()));
        prop_assert!(close(a.conj().to_complex(), a.to_complex().conj()));
    }

    #[test]
    fn promotion_preserves_value((n, a, _b, _c) in conductor_and_triple(), k in 1u32..=3) {
        let p = a.promote(n * k);
        prop_assert_eq!(&p, &a);
        prop_assert!(close(p.to_complex(), a.to_complex()));
    }

    #[test]
    fn series_inverse_round_trip(
        c0 in prop_oneof![-5i64..=-1, 1i64..=5],
        rest in prop::collection::vec(-5i64..=5, 0..8),
        order in 1usize..12,
    ) {
        let mut coeffs = vec![c0];
        coeffs.extend(rest);
        let p = PolyT::from_ints(&coeffs);
        let inv = SeriesT::inverse_of(&p, order).unwrap();
        let back = inv.mul_poly(&p);
        for k in 0..=order {
            let expect = if k == 0 { CycNum::one() } else { CycNum::zero() };
            prop_assert_eq!(back.coeff(k), expect);
        }
    }

    #[test]
    fn exact_polynomial_division(a in prop::collection::vec(-4i64..=4, 1..6), b in prop::collection::vec(-4i64..=4, 1..5)) {
        let a = PolyT::from_ints(&a);
        let mut b = PolyT::from_ints(&b);
        if b.is_zero() {
            b = PolyT::one();
        }
        let prod = &a * &b;
        prop_assert_eq!(prod.divide_exact(&b).unwrap(), a);
    }

    #[test]
    fn determinant_is_multiplicative(a in prop::collection::vec(-3i64..=3, 9), b in prop::collection::vec(-3i64..=3, 9)) {
        let m = |v: &[i64]| Matrix::from_ints(&[&v[0..3], &v[3..6], &v[6..9]]);
        let (x, y) = (m(&a), m(&b));
        prop_assert_eq!((&x * &y).det().unwrap(), &x.det().unwrap() * &y.det().unwrap());
        if let Ok(inv) = x.inverse() {
            prop_assert!((&x * &inv).is_identity());
        }
    }

    #[test]
    fn substitution_composes(coeffs in prop::collection::vec(-3i64..=3, 6), a in prop::collection::vec(-2i64..=2, 4), b in prop::collection::vec(-2i64..=2, 4)) {
        // Quadratic form in two variables, f(ABx) = (f∘A)(Bx).
        let mut f = MultiPoly::zero(2);
        for (c, e) in coeffs.iter().zip([[2, 0], [1, 1], [0, 2], [1, 0], [0, 1], [0, 0]]) {
            f = &f + &MultiPoly::monomial(2, e.to_vec(), CycNum::from_int(*c));
        }
        let am = Matrix::from_ints(&[&a[0..2], &a[2..4]]);
        let bm = Matrix::from_ints(&[&b[0..2], &b[2..4]]);
        prop_assert_eq!(f.substitute_linear(&am).substitute_linear(&bm), f.substitute_linear(&(&am * &bm)));
    }
}

// Group-level invariants over the fixed corpus.

#[test]
fn stabilizers_are_cyclic_with_distinguished_generator() {
    for s in common::corpus() {
        let g = common::build(s);
        for h in &g.hyperplanes {
            let e = h.order;
            assert_eq!(h.stabilizer.len(), e, "{s}");
            assert_eq!(g.dets[h.distinguished], CycNum::zeta(e as u32, 1), "{s}");
            let powers: std::collections::BTreeSet<usize> = (0..e).map(|k| g.pow(h.distinguished, k)).collect();
            let stab: std::collections::BTreeSet<usize> = h.stabilizer.iter().copied().collect();
            assert_eq!(powers, stab, "{s}");
        }
    }
}

#[test]
fn orbit_products_are_semi_invariant() {
    for s in common::corpus() {
        let g = common::build(s);
        for o in &g.orbits {
            for (gi, gen) in g.generators.iter().enumerate() {
                let moved = o.pi.substitute_linear(&gen.inverse().unwrap());
                let chi = &o.generator_character[gi];
                assert_eq!(moved, o.pi.scale(chi), "{s}");
                assert!(chi.pow(g.exponent as i64).unwrap().is_one());
            }
        }
    }
}

#[test]
fn dihedral_degrees() {
    for m in 2..=6usize {
        let g = common::build(&format!("G({m},{m},2)"));
        let mut d = g.degrees.clone();
        d.sort();
        let mut want = vec![2, m];
        want.sort();
        assert_eq!(d, want, "G({m},{m},2)");
        assert_eq!(g.order(), 2 * m);
    }
}

#[test]
fn linear_twists_shift_local_data() {
    use reflekt::chars::{character_table, local_data, tensor_with_linear, ClassFunction};
    for s in common::corpus() {
        let g = common::build(s);
        let t = character_table(&g).unwrap();
        for lam in t.rows.iter().filter(|r| r.is_linear()) {
            for tau in &t.rows {
                let base = local_data(tau, &g).unwrap();
                let twisted = local_data(&tensor_with_linear(tau, lam).unwrap(), &g).unwrap();
                for (c, o) in g.orbits.iter().enumerate() {
                    let h = &g.hyperplanes[o.members[0]];
                    let e = o.order;
                    // λ(s_H) = det(s_H)^a, so det^{-j} becomes det^{-(j-a)}.
                    let a = (0..e).find(|&a| *lam.at(&g, h.distinguished) == g.dets[h.distinguished].pow(a as i64).unwrap()).unwrap();
                    for j in 0..e {
                        assert_eq!(twisted.n[c][j], base.n[c][(j + a) % e], "{s}");
                    }
                }
            }
        }
        // χ_C is a linear row supported on a single residue.
        for oi in 0..g.orbits.len() {
            let chi = ClassFunction::new(g.orbit_character(oi));
            assert!(t.find(&chi).is_some(), "{s}");
            let ld = local_data(&chi, &g).unwrap();
            assert_eq!(ld.n[oi].iter().filter(|&&x| x == 1).count(), 1);
        }
    }
}

#[test]
fn det_fake_degree_is_top_monomial_for_coxeter_groups() {
    use reflekt::chars::{character_table, det_character};
    use reflekt::fake::FakeContext;
    for s in ["S3", "S4", "G(2,1,2)", "G(2,2,2)", "G(3,3,2)", "G(4,4,2)", "G(5,5,2)", "G(6,6,2)", "G(2,1,1)"] {
        let g = common::build(s);
        let t = character_table(&g).unwrap();
        let ctx = FakeContext::new(&g, &t).unwrap();
        let r = t.find(&det_character(&g)).unwrap();
        assert_eq!(ctx.fake(r).polynomial, PolyT::monomial(CycNum::one(), g.num_reflections()), "{s}");
    }
}

#[test]
fn symmetry_with_zero_b_matches_itself() {
    use reflekt::chars::character_table;
    use reflekt::fake::{verify_symmetry, FakeContext};
    for s in common::corpus() {
        let g = common::build(s);
        let t = character_table(&g).unwrap();
        let ctx = FakeContext::new(&g, &t).unwrap();
        for item in verify_symmetry(&ctx).unwrap() {
            if item.b.iter().all(|&x| x == 0) {
                assert!(item.matches.contains(&item.rep), "{s}");
            }
        }
    }
}
