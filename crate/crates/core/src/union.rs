//! Union information: the least whole-to-target mutual information over all
//! joint distributions that keep every `(X_i, Y)` pair marginal, together with
//! its product-of-conditionals upper bound, the synergy it induces, the dual
//! intersection information, and the two-predictor decomposition.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};
use serde::Serialize;

use crate::classic::s_max;
use crate::dist::{flat_index, for_each_index, Bits, JointTable, ZERO_MASS};
use crate::error::{Error, Result};
use crate::optimize::{minimize, ConstraintSystem, LinearConstraint, Objective, OptimizerConfig};

/// Largest predictor count accepted by [`intersection_information`].
pub const INTERSECTION_CAP: usize = 3;

/// Smoothing added inside the gradient's logarithm so empty cells get a
/// finite pull instead of `−∞`.
const GRADIENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionInfoResult {
    pub upper_bound_table: JointTable,
    pub upper_bound_value: Bits,
    pub best_value: Bits,
    pub best_table: JointTable,
    pub converged: bool,
    pub restarts_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SvkInterval {
    /// Whole information minus the analytic upper bound on union information.
    pub lower: Bits,
    /// Whole information minus the lowest union information found.
    pub best: Bits,
    /// `S_max` of the same table.
    pub upper: Bits,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pid2 {
    pub redundancy: Bits,
    pub unique1: Bits,
    pub unique2: Bits,
    pub synergy: Bits,
}

/// `Pr*(x_1,…,x_n,y) = Pr(y) Π Pr(x_i | y)`: always satisfies the pair-marginal
/// constraints, so its mutual information bounds the union information above.
pub fn analytic_upper_bound(table: &JointTable) -> JointTable {
    let n = table.n_predictors();
    let shape = table.shape();
    let ny = shape[n];
    let py = table.target_marginal();
    let pairs: Vec<Vec<f64>> = (0..n).map(|i| table.pair_marginal(i)).collect();
    let mut mass = vec![0.0; table.mass().len()];
    for_each_index(&shape, |idx| {
        let y = idx[n];
        if py[y] <= 0.0 {
            return;
        }
        let mut p = py[y];
        for i in 0..n {
            p *= pairs[i][idx[i] * ny + y] / py[y];
        }
        mass[flat_index(&shape, idx)] = p;
    });
    JointTable::new(table.predictors().to_vec(), table.target().clone(), mass)
        .expect("product of conditionals is normalized")
}

/// For each predictor, the earlier predictor it duplicates (if any) and the
/// state map from that predictor's states to its own.
fn duplicates(table: &JointTable) -> Vec<Option<(usize, Vec<usize>)>> {
    let n = table.n_predictors();
    let shape = table.shape();
    let mut out: Vec<Option<(usize, Vec<usize>)>> = vec![None; n];
    for j in 0..n {
        for i in (0..j).filter(|&i| out[i].is_none()) {
            let joint = table.project(&[i, j]);
            let (ni, nj) = (shape[i], shape[j]);
            let mut map = vec![usize::MAX; ni];
            let mut inverse = vec![usize::MAX; nj];
            let mut bijective = true;
            for a in 0..ni {
                for b in 0..nj {
                    if joint[a * nj + b] <= ZERO_MASS {
                        continue;
                    }
                    if (map[a] != usize::MAX && map[a] != b) || (inverse[b] != usize::MAX && inverse[b] != a) {
                        bijective = false;
                    }
                    map[a] = b;
                    inverse[b] = a;
                }
            }
            if bijective {
                out[j] = Some((i, map));
                break;
            }
        }
    }
    out
}

/// The analytic upper bound computed with exact duplicate predictors merged,
/// then lifted back so every copy follows its original. Equal to
/// [`analytic_upper_bound`] when no predictor duplicates another, and never
/// above it otherwise.
pub fn union_upper_bound(table: &JointTable) -> JointTable {
    let dups = duplicates(table);
    if dups.iter().all(Option::is_none) {
        return analytic_upper_bound(table);
    }
    let n = table.n_predictors();
    let shape = table.shape();
    let ny = shape[n];
    let py = table.target_marginal();
    let pairs: Vec<Vec<f64>> = (0..n).map(|i| table.pair_marginal(i)).collect();
    let mut mass = vec![0.0; table.mass().len()];
    for_each_index(&shape, |idx| {
        let y = idx[n];
        if py[y] <= 0.0 {
            return;
        }
        let mut p = py[y];
        for i in 0..n {
            match &dups[i] {
                Some((orig, map)) if map[idx[*orig]] != idx[i] => return,
                Some(_) => {}
                None => p *= pairs[i][idx[i] * ny + y] / py[y],
            }
        }
        mass[flat_index(&shape, idx)] = p;
    });
    JointTable::new(table.predictors().to_vec(), table.target().clone(), mass)
        .expect("lifted product of conditionals is normalized")
}

/// The constrained minimization problem over the cells that can carry mass.
///
/// A cell `(x, y)` is free only when every `Pr(x_i, y)` is positive; the
/// others are pinned to zero by nonnegativity, so they are dropped.
#[derive(Debug, Clone)]
pub struct UnionProblem {
    template: JointTable,
    cells: Vec<usize>,
    group: Vec<usize>,
    target_state: Vec<usize>,
    n_groups: usize,
    target_mass: Vec<f64>,
    system: ConstraintSystem,
}

impl UnionProblem {
    pub fn new(table: &JointTable) -> Result<Self> {
        let n = table.n_predictors();
        let shape = table.shape();
        let ny = shape[n];
        let pairs: Vec<Vec<f64>> = (0..n).map(|i| table.pair_marginal(i)).collect();
        let mut cells = Vec::new();
        let mut group_of_x = std::collections::HashMap::new();
        let mut group = Vec::new();
        let mut target_state = Vec::new();
        let mut row_index = std::collections::HashMap::new();
        let mut rows: Vec<LinearConstraint> = Vec::new();
        for_each_index(&shape, |idx| {
            let y = idx[n];
            if (0..n).any(|i| pairs[i][idx[i] * ny + y] <= ZERO_MASS) {
                return;
            }
            let k = cells.len();
            let flat = flat_index(&shape, idx);
            cells.push(flat);
            let x_flat = flat / ny;
            let next = group_of_x.len();
            group.push(*group_of_x.entry(x_flat).or_insert(next));
            target_state.push(y);
            for i in 0..n {
                let key = (i, idx[i], y);
                let r = *row_index.entry(key).or_insert_with(|| {
                    rows.push(LinearConstraint {
                        terms: Vec::new(),
                        rhs: pairs[i][idx[i] * ny + y],
                    });
                    rows.len() - 1
                });
                rows[r].terms.push((k, 1.0));
            }
        });
        let system = ConstraintSystem::new(cells.len(), rows)?;
        Ok(Self {
            template: table.clone(),
            n_groups: group_of_x.len(),
            cells,
            group,
            target_state,
            target_mass: table.target_marginal(),
            system,
        })
    }

    pub fn system(&self) -> &ConstraintSystem {
        &self.system
    }

    pub fn dimension(&self) -> usize {
        self.cells.len()
    }

    /// Restricts a dense table over the same axes to the free cells.
    pub fn restrict(&self, table: &JointTable) -> Vec<f64> {
        self.cells.iter().map(|&c| table.mass()[c]).collect()
    }

    /// Expands a point back into a dense table.
    pub fn expand(&self, point: &[f64]) -> Result<JointTable> {
        let mut mass = vec![0.0; self.template.mass().len()];
        for (&c, &p) in self.cells.iter().zip(point) {
            mass[c] = p.max(0.0);
        }
        let total: f64 = mass.iter().sum();
        if total > 0.0 {
            mass.iter_mut().for_each(|m| *m /= total);
        }
        JointTable::new(
            self.template.predictors().to_vec(),
            self.template.target().clone(),
            mass,
        )
    }

    fn predictor_marginal(&self, point: &[f64]) -> Vec<f64> {
        let mut qx = vec![0.0; self.n_groups];
        for (&g, &p) in self.group.iter().zip(point) {
            qx[g] += p;
        }
        qx
    }
}

/// `I*(X_1…X_n : Y)` in bits with the target marginal held at `Pr(Y)`.
impl Objective for UnionProblem {
    fn value(&self, q: &[f64]) -> f64 {
        let qx = self.predictor_marginal(q);
        q.iter()
            .zip(&self.group)
            .zip(&self.target_state)
            .filter(|((&p, _), _)| p > 0.0)
            .map(|((&p, &g), &y)| p * (p / (qx[g] * self.target_mass[y])).log2())
            .sum()
    }

    /// `∂I*/∂q(x,y) = log₂ q(x,y) / (q(x) Pr(y))`.
    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        let qx = self.predictor_marginal(q);
        for (k, o) in out.iter_mut().enumerate() {
            let p = q[k].max(0.0);
            let g = self.group[k];
            *o = ((p + GRADIENT_FLOOR) / ((qx[g].max(0.0) + GRADIENT_FLOOR) * self.target_mass[self.target_state[k]]))
                .log2();
        }
    }
}

fn dirichlet_point(rng: &mut ChaCha8Rng, dimension: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..dimension).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Union information by constrained minimization, warm-started at the
/// analytic upper bound and at `cfg.restarts` seeded random perturbations of it.
pub fn minimize_union_information(
    table: &JointTable,
    cfg: &OptimizerConfig,
) -> Result<UnionInfoResult> {
    cfg.validate()?;
    let upper_bound_table = union_upper_bound(table);
    let upper_bound_value = upper_bound_table.whole_information();
    if table.n_predictors() == 1 {
        return Ok(UnionInfoResult {
            best_value: table.whole_information(),
            best_table: table.clone(),
            upper_bound_value,
            upper_bound_table,
            converged: true,
            restarts_used: 0,
        });
    }
    let problem = UnionProblem::new(table)?;
    let anchor = problem.restrict(&upper_bound_table);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts = vec![anchor.clone()];
    for _ in 0..cfg.restarts {
        let noise = dirichlet_point(&mut rng, problem.dimension());
        let feasible = problem
            .system()
            .project_feasible(&noise, cfg.feasibility_tolerance)?;
        // The midpoint with the strictly positive anchor stays feasible and
        // keeps every free cell away from zero.
        starts.push(anchor.iter().zip(&feasible).map(|(a, f)| 0.5 * (a + f)).collect());
    }
    let found = minimize(&problem, problem.system(), &starts, cfg)?;
    let best_table = problem.expand(&found.point)?;
    Ok(UnionInfoResult {
        best_value: Bits::new(found.value.max(0.0)),
        best_table,
        upper_bound_value,
        upper_bound_table,
        converged: found.converged,
        restarts_used: cfg.restarts,
    })
}

/// Synergy as whole information beyond the union of the singletons, bracketed
/// by the analytic bound below and `S_max` above.
pub fn s_vk(table: &JointTable, cfg: &OptimizerConfig) -> Result<SvkInterval> {
    let upper = s_max(table)?;
    let union = minimize_union_information(table, cfg)?;
    Ok(interval_from(table, &union, upper))
}

pub(crate) fn interval_from(table: &JointTable, union: &UnionInfoResult, upper: Bits) -> SvkInterval {
    let whole = table.whole_information().get();
    SvkInterval {
        lower: Bits::new(whole - union.upper_bound_value.get()),
        best: Bits::new(whole - union.best_value.get()),
        upper,
        converged: union.converged,
    }
}

/// Inclusion–exclusion of union information over every non-empty predictor subset.
pub fn intersection_information(table: &JointTable, cfg: &OptimizerConfig) -> Result<Bits> {
    let n = table.n_predictors();
    if n > INTERSECTION_CAP {
        return Err(Error::TooManyPredictors {
            n,
            cap: INTERSECTION_CAP,
        });
    }
    let names = table.predictor_names();
    let target = [table.target_name()];
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let subset: Vec<&str> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| names[i])
            .collect();
        let sub = table.select(&subset, &target)?;
        let value = minimize_union_information(&sub, cfg)?.best_value.get();
        let sign = if subset.len() % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * value;
    }
    Ok(Bits::new(total))
}

/// Redundant, unique and synergistic regions for two predictors.
pub fn pid2(table: &JointTable, cfg: &OptimizerConfig) -> Result<Pid2> {
    let union = minimize_union_information_pair(table, cfg)?;
    Ok(pid2_from(table, union.best_value))
}

fn minimize_union_information_pair(table: &JointTable, cfg: &OptimizerConfig) -> Result<UnionInfoResult> {
    if table.n_predictors() != 2 {
        return Err(Error::PredictorCount {
            expected: 2,
            found: table.n_predictors(),
        });
    }
    minimize_union_information(table, cfg)
}

pub(crate) fn pid2_from(table: &JointTable, union_value: Bits) -> Pid2 {
    let i1 = table.singleton_information(0).get();
    let i2 = table.singleton_information(1).get();
    let union = union_value.get();
    let redundancy = i1 + i2 - union;
    Pid2 {
        redundancy: Bits::new(redundancy),
        unique1: Bits::new(i1 - redundancy),
        unique2: Bits::new(i2 - redundancy),
        synergy: Bits::new(table.whole_information().get() - union),
    }
}
