//! Sanity checks of the test-side oracles on hand-computable cases, then
//! agreement with the library on the whole corpus.

mod common;

use common::oracle::*;
use num::complex::Complex64;
use reflekt::chars::character_table;
use reflekt::exact::{CycNum, Matrix};
use reflekt::fake::FakeContext;

fn ints(v: &[CycNum]) -> Vec<i64> {
    v.iter().map(|c| c.as_i64().expect("integer coefficient")).collect()
}

#[test]
fn laplace_det_by_hand() {
    // det(I − T·[[0,1],[1,0]]) = 1 − T².
    let m = Matrix::from_ints(&[&[0, 1], &[1, 0]]);
    assert_eq!(ints(&det_one_minus_t(&m)), vec![1, 0, -1]);
    let m = Matrix::from_ints(&[&[2, 0, 0], &[0, 1, 0], &[0, 0, 3]]);
    assert_eq!(ints(&det_one_minus_t(&m)), vec![1, -6, 11, -6]);
}

#[test]
fn series_quotient_by_hand() {
    // 1/(1 − T) = 1 + T + T² + ...
    let q = series_quotient(&[CycNum::one()], &[CycNum::one(), CycNum::from_int(-1)], 4);
    assert_eq!(ints(&q), vec![1; 5]);
}

#[test]
fn free_algebra_by_hand() {
    // degrees {2, 3}: 1, 0, 1, 1, 1, 1, 2
    assert_eq!(free_algebra_series(&[2, 3], 6), vec![1, 0, 1, 1, 1, 1, 2]);
}

#[test]
fn molien_matches_degrees_on_corpus() {
    for s in common::corpus() {
        let g = common::build(s);
        let order = g.degrees.iter().sum::<usize>() + 4;
        let m = brute_molien(&g, order);
        assert_eq!(ints(&m), free_algebra_series(&g.degrees, order), "{s}");
    }
}

#[test]
fn brute_fake_degrees_match_library() {
    for s in common::corpus() {
        let g = common::build(s);
        let t = character_table(&g).unwrap();
        let ctx = FakeContext::new(&g, &t).unwrap();
        let nr = g.num_reflections();
        for (r, row) in t.rows.iter().enumerate() {
            let brute = brute_fake_degree(&g, &row.values, &g.degrees, nr);
            let lib = ctx.fake(r).polynomial.coeffs().to_vec();
            let mut b = brute.clone();
            while b.last().is_some_and(|c| c.is_zero()) {
                b.pop();
            }
            assert_eq!(b, lib, "{s} row {r}");
        }
    }
}

#[test]
fn regular_oracle_on_cyclic_group() {
    let g = common::build("G(4,1,1)");
    let chars = regular_characters(&g, 1);
    assert_eq!(chars.len(), 4);
    for c in &chars {
        assert!((c[0] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        for z in c {
            assert!((z.norm() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn regular_oracle_matches_tables() {
    for s in common::corpus() {
        let g = common::build(s);
        if g.order() > 48 {
            continue;
        }
        let t = character_table(&g).unwrap();
        let oracle = regular_characters(&g, 7);
        assert_eq!(oracle.len(), t.len(), "{s}");
        let mut used = vec![false; oracle.len()];
        for (r, row) in t.rows.iter().enumerate() {
            let vals: Vec<Complex64> = row.values.iter().map(CycNum::to_complex).collect();
            let hit = oracle.iter().position(|o| o.iter().zip(&vals).all(|(a, b)| (a - b).norm() < 1e-8));
            let i = hit.unwrap_or_else(|| panic!("{s}: row {r} not found by the oracle"));
            assert!(!used[i]);
            used[i] = true;
        }
    }
}
