#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synergy_core::{JointTable, VariableAxis};

pub fn axis(name: &str, k: usize) -> VariableAxis {
    VariableAxis::new(name, (0..k).map(|i| i.to_string()).collect::<Vec<_>>()).unwrap()
}

pub fn table(shape: &[usize], weights: &[f64]) -> JointTable {
    let n = shape.len() - 1;
    let predictors = (0..n).map(|i| axis(&format!("X{}", i + 1), shape[i])).collect();
    let total: f64 = weights.iter().sum();
    let mass = weights.iter().map(|w| w / total).collect();
    JointTable::new(predictors, axis("Y", shape[n]), mass).unwrap()
}

/// Tables with 2 or 3 predictors, alphabets of 2 or 3, and some empty cells.
pub fn arb_table() -> impl Strategy<Value = JointTable> {
    (2usize..=3)
        .prop_flat_map(|n| prop::collection::vec(2usize..=3, n + 1))
        .prop_flat_map(|shape| {
            let cells: usize = shape.iter().product();
            (
                Just(shape),
                prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.01f64..1.0], cells),
            )
        })
        .prop_filter("needs positive mass", |(_, w)| w.iter().any(|&v| v > 0.0))
        .prop_map(|(shape, w)| table(&shape, &w))
}

/// Seeded tables in the same family as [`arb_table`].
pub fn seeded_tables(seed: u64, count: usize) -> Vec<JointTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=3);
            let shape: Vec<usize> = (0..=n).map(|_| rng.random_range(2..=3)).collect();
            let cells: usize = shape.iter().product();
            let mut w: Vec<f64> = (0..cells)
                .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.01..1.0) })
                .collect();
            if w.iter().all(|&v| v == 0.0) {
                w[0] = 1.0;
            }
            table(&shape, &w)
        })
        .collect()
}

/// Brute-force entropy of the named axes, from an explicit label-keyed marginal.
pub fn oracle_entropy(t: &JointTable, names: &[&str]) -> f64 {
    use std::collections::BTreeMap;
    let idx: Vec<usize> = names.iter().map(|n| t.axis_index(n).unwrap()).collect();
    let mut marginal: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (cell, p) in t.cells() {
        *marginal.entry(idx.iter().map(|&i| cell[i]).collect()).or_default() += p;
    }
    -marginal
        .values()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

pub fn oracle_mi(t: &JointTable, a: &[&str], b: &[&str]) -> f64 {
    let ab: Vec<&str> = a.iter().chain(b).copied().collect();
    oracle_entropy(t, a) + oracle_entropy(t, b) - oracle_entropy(t, &ab)
}
