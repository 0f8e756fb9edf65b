mod common;

use reflekt::chars::character_table;

#[test]
fn corpus_structure_identities() {
    for s in common::corpus() {
        let g = common::build(s);
        let prod: usize = g.degrees.iter().product();
        assert_eq!(prod, g.order(), "{s}");
        assert_eq!(g.coexponents_sum(), g.num_reflections(), "{s}");
        let via_orbits: usize = g.orbits.iter().map(|o| o.members.len() * (o.order - 1)).sum();
        assert_eq!(via_orbits, g.num_reflections(), "{s}");
        assert_eq!(g.class_sizes().iter().sum::<usize>(), g.order());
        let t = character_table(&g).unwrap();
        assert_eq!(t.len(), g.classes.len());
        assert!(t.columns_orthogonal(&g), "{s}");
        eprintln!("{s}: |W|={} degrees={:?} classes={} p={}", g.order(), g.degrees, g.classes.len(), t.prime);
    }
}

#[test]
fn corpus_fake_identities() {
    use reflekt::fake::*;
    for s in common::corpus() {
        let g = common::build(s);
        let t = character_table(&g).unwrap();
        let ctx = FakeContext::new(&g, &t).unwrap();
        assert!(ctx.conjugate_rows.is_empty(), "{s}");
        assert!(poincare_identity(&ctx).unwrap().pass, "{s}");
        for r in 0..t.len() {
            assert!(verify_pn_identity(&ctx, r).unwrap().pass, "{s} row {r}");
        }
        let sym = verify_symmetry(&ctx).unwrap();
        let bad: Vec<_> = sym.iter().filter(|i| !i.pass).collect();
        assert!(bad.is_empty(), "{s}: {bad:?}");
        let twist_ok = sym.iter().all(|i| i.local_data_twisted.iter().any(|&b| b));
        let pal = palindrome_check(&ctx).unwrap();
        let badp: Vec<_> = pal.iter().filter(|i| !i.pass).collect();
        assert!(badp.is_empty(), "{s}: {badp:?}");
        eprintln!("{s}: ok, twist diag {twist_ok}");
    }
}

#[test]
fn minimal_matrices_small_corpus() {
    use reflekt::fake::FakeContext;
    use reflekt::minmat::*;
    for s in ["S3", "S4", "G(2,1,2)", "G(3,1,2)", "G(2,1,1)", "G(3,1,1)", "G(4,1,1)"] {
        let t0 = std::time::Instant::now();
        let g = common::build(s);
        let t = character_table(&g).unwrap();
        let ctx = FakeContext::new(&g, &t).unwrap();
        for r in 0..t.len() {
            let mm = build_minimal_matrix(&g, &t, r, ctx.fake(r), DEFAULT_SEED).unwrap();
            assert!(verify_equivariance(&g, &mm).unwrap(), "{s} {r}");
            assert!(verify_det_factorization(&g, &t, &mm).unwrap().pass, "{s} {r}");
            let (n, d) = sample_non_minimal(&g, &mm, ctx.fake(r), DEFAULT_SEED).unwrap();
            assert!(verify_quotient_property(&g, &mm, &n, d).unwrap().pass, "{s} {r}");
        }
        eprintln!("{s}: {:?}", t0.elapsed());
    }
}
