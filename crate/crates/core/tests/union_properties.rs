mod common;

use common::{arb_table, seeded_tables, table};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synergy_core::optimize::Objective;
use synergy_core::union::UnionProblem;
use synergy_core::{
    analytic_upper_bound, build_example, compile_text, minimize_union_information, pid2, s_max,
    s_vk, wms, ExampleId, JointTable, OptimizerConfig, VariableAxis,
};

fn cfg() -> OptimizerConfig {
    OptimizerConfig::default()
}

fn union(t: &JointTable) -> f64 {
    minimize_union_information(t, &cfg()).unwrap().best_value.get()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn upper_bound_preserves_pair_marginals(t in arb_table()) {
        let star = analytic_upper_bound(&t);
        for (a, b) in star.target_marginal().iter().zip(t.target_marginal()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
        for i in 0..t.n_predictors() {
            for (a, b) in star.pair_marginal(i).iter().zip(t.pair_marginal(i)) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn bounds_chain_on_corpus_and_random_tables() {
    let mut tables: Vec<JointTable> = ExampleId::ALL.into_iter().map(build_example).collect();
    tables.extend(seeded_tables(2024, 50));
    for t in &tables {
        let s = s_vk(t, &cfg()).unwrap();
        let w = wms(t).unwrap().get();
        let whole = t.whole_information().get();
        assert!(w.max(0.0) - 1e-3 <= s.best.get(), "wms {w} > {:?}", s);
        assert!(s.best.get() <= s.upper.get() + 1e-6, "{s:?}");
        assert!(s.upper.get() <= whole + 1e-6);
        assert!(s.lower.get() <= s.best.get() + 1e-9, "{s:?}");
        assert!(s.best.get() >= -1e-9);
    }
}

#[test]
fn best_table_is_feasible_and_below_the_bound() {
    for t in seeded_tables(5, 30) {
        let r = minimize_union_information(&t, &cfg()).unwrap();
        assert!(r.best_value.get() <= r.upper_bound_value.get() + 1e-9);
        let imax = (0..t.n_predictors())
            .map(|i| t.singleton_information(i).get())
            .fold(0.0, f64::max);
        assert!(imax - 1e-6 <= r.best_value.get());
        assert_eq!(r.best_table.target_marginal().len(), t.target_marginal().len());
        for i in 0..t.n_predictors() {
            for (a, b) in r.best_table.pair_marginal(i).iter().zip(t.pair_marginal(i)) {
                assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn global_positivity() {
    for t in seeded_tables(17, 30) {
        assert!(union(&t) >= -1e-12);
    }
}

#[test]
fn self_redundancy() {
    for t in seeded_tables(19, 50) {
        let single = t.select(&["X1"], &["Y"]).unwrap();
        assert_eq!(
            minimize_union_information(&single, &cfg()).unwrap().best_value,
            single.whole_information()
        );
    }
}

#[test]
fn reordering_predictors_is_harmless() {
    for t in seeded_tables(23, 20) {
        let names = t.predictor_names();
        let mut reversed = names.clone();
        reversed.reverse();
        let swapped = t.select(&reversed, &["Y"]).unwrap();
        assert!((union(&t) - union(&swapped)).abs() < 1e-6);
    }
}

#[test]
fn strong_identity() {
    let t = compile_text(
        "source a uniform(2)\nsource b uniform(2)\nY := CONCAT(a, b)\npredictors: a b\ntarget: Y",
    )
    .unwrap();
    let h = t.entropy(&["a", "b"]).unwrap().get();
    assert!((h - 2.0).abs() < 1e-12);
    assert!((union(&t) - h).abs() < 1e-6);
}

#[test]
fn target_monotonicity_on_corpus() {
    let triples = [
        ExampleId::XorDuplicate,
        ExampleId::XorLoses,
        ExampleId::AndDuplicate,
        ExampleId::XorMultiCoal,
    ];
    for id in triples {
        let t = build_example(id);
        for (i, j, k) in [("X1", "X2", "X3"), ("X1", "X3", "X2"), ("X2", "X3", "X1")] {
            let narrow = t.select(&[i, j], &["Y"]).unwrap();
            let wide = t.select(&[i, j], &["Y", k]).unwrap();
            assert!(union(&narrow) <= union(&wide) + 1e-4, "{id} {i}{j}:{k}");
        }
    }
}

#[test]
fn strong_symmetry_fails() {
    let bit = |n: &str| VariableAxis::new(n, ["0", "1"]).unwrap();
    let constant = VariableAxis::new("Z", ["0"]).unwrap();
    let t = JointTable::new(vec![bit("X"), bit("Y")], constant, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    assert_eq!(union(&t.select(&["X", "Y"], &["Z"]).unwrap()), 0.0);
    assert_eq!(union(&t.select(&["X", "Z"], &["Y"]).unwrap()), 1.0);
}

#[test]
fn pid2_regions_are_consistent_and_nonnegative() {
    let mut tables: Vec<JointTable> = seeded_tables(29, 120)
        .into_iter()
        .filter(|t| t.n_predictors() == 2)
        .collect();
    tables.extend(
        [ExampleId::Rdn, ExampleId::Unq, ExampleId::Xor, ExampleId::RdnXor, ExampleId::And, ExampleId::RdnUnqXor]
            .map(build_example),
    );
    for t in tables {
        let p = pid2(&t, &cfg()).unwrap();
        for r in [p.redundancy, p.unique1, p.unique2, p.synergy] {
            assert!(r.get() >= -1e-6, "{p:?}");
        }
        let i1 = t.singleton_information(0).get();
        let i2 = t.singleton_information(1).get();
        assert!((p.redundancy.get() + p.unique1.get() - i1).abs() < 1e-6);
        assert!((p.redundancy.get() + p.unique2.get() - i2).abs() < 1e-6);
        let sum = p.redundancy.get() + p.unique1.get() + p.unique2.get() + p.synergy.get();
        assert!((sum - t.whole_information().get()).abs() < 1e-6);
    }
}

#[test]
fn duplicates_do_not_change_synergy() {
    let s = |id| s_vk(&build_example(id), &cfg()).unwrap().best.get();
    assert!((s(ExampleId::Xor) - s(ExampleId::XorDuplicate)).abs() < 1e-4);
    assert!((s(ExampleId::And) - s(ExampleId::AndDuplicate)).abs() < 1e-3);
}

#[test]
fn and_interval() {
    let t = build_example(ExampleId::And);
    let s = s_vk(&t, &cfg()).unwrap();
    assert!(s.lower.get() >= 0.2704 - 1e-4);
    assert!((s.upper.get() - 0.5).abs() < 1e-6);
    assert!(s.lower.get() <= s.best.get() && s.best.get() <= s.upper.get() + 1e-6);
    assert_eq!(s.upper, s_max(&t).unwrap());
    let i = t.mutual_information(&["X1"], &["X2"]).unwrap().get();
    assert!(i.abs() < 1e-12);
    assert!(pid2(&t, &cfg()).unwrap().redundancy.get() >= 0.0817 - 1e-3);
}

/// Analytic gradient against central differences at interior feasible points.
#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let h = 1e-6;
    for _ in 0..50 {
        let n = rng.random_range(2..=3);
        let shape: Vec<usize> = (0..=n).map(|_| rng.random_range(2..=3)).collect();
        let cells: usize = shape.iter().product();
        let w: Vec<f64> = (0..cells).map(|_| rng.random_range(0.05..1.0)).collect();
        let t = table(&shape, &w);
        let problem = UnionProblem::new(&t).unwrap();
        let star = problem.restrict(&analytic_upper_bound(&t));
        let orig = problem.restrict(&t);
        let mix: f64 = rng.random_range(0.1..0.9);
        let q: Vec<f64> = star.iter().zip(&orig).map(|(a, b)| mix * a + (1.0 - mix) * b).collect();
        assert!(problem.system().residual(&q) < 1e-12);
        let mut grad = vec![0.0; q.len()];
        problem.gradient(&q, &mut grad);
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for k in 0..q.len() {
            let mut up = q.clone();
            let mut down = q.clone();
            up[k] += h;
            down[k] -= h;
            let fd = (problem.value(&up) - problem.value(&down)) / (2.0 * h);
            err += (fd - grad[k]).powi(2);
            scale += grad[k].powi(2);
        }
        let rel = err.sqrt() / scale.sqrt().max(1e-12);
        assert!(rel < 1e-4, "relative error {rel}");
    }
}
