#![allow(dead_code)]

pub mod oracle;

use num::complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use reflekt::group::{build_group, ReflectionGroup};
use reflekt::kz::LabelVector;

pub const CORPUS: &[&str] = &[
    "S3", "S4", "G(2,1,2)", "G(3,1,2)", "G(3,3,3)", "G(4,4,2)", "G(2,1,1)", "G(3,1,1)", "G(4,1,1)",
    "G(5,1,1)", "G(6,1,1)", "G(2,2,2)", "G(3,3,2)", "G(4,4,2)", "G(5,5,2)", "G(6,6,2)",
];

/// Corpus with the repeated G(4,4,2) removed, order preserved.
pub fn corpus() -> Vec<&'static str> {
    let mut seen = std::collections::HashSet::new();
    CORPUS.iter().copied().filter(|s| seen.insert(*s)).collect()
}

pub fn build(s: &str) -> ReflectionGroup {
    build_group(&s.parse().unwrap()).unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// Random complex labels, each with `|k| <= r`.
pub fn random_labels(g: &ReflectionGroup, rng: &mut ChaCha8Rng, r: f64) -> LabelVector {
    let k = g
        .orbits
        .iter()
        .map(|o| {
            (0..o.order)
                .map(|_| loop {
                    let z = Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
                    if z.norm() <= r {
                        break z;
                    }
                })
                .collect()
        })
        .collect();
    LabelVector::new(g, k).unwrap()
}

/// All integral label vectors with entries in `-b..=b`.
pub fn integral_grid(g: &ReflectionGroup, b: i64) -> Vec<LabelVector> {
    let sizes: Vec<usize> = g.orbits.iter().map(|o| o.order).collect();
    let total: usize = sizes.iter().sum();
    let span = (2 * b + 1) as usize;
    (0..span.pow(total as u32))
        .map(|mut code| {
            let mut flat = Vec::with_capacity(total);
            for _ in 0..total {
                flat.push((code % span) as f64 - b as f64);
                code /= span;
            }
            let mut it = flat.into_iter();
            let k: Vec<Vec<f64>> = sizes.iter().map(|&e| it.by_ref().take(e).collect()).collect();
            LabelVector::from_real(g, &k).unwrap()
        })
        .collect()
}
