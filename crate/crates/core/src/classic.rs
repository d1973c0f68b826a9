//! The three earlier synergy measures: `S_max`, WholeMinusSum, and
//! correlational importance `ΔI`.

use serde::Serialize;

use crate::dist::{flat_index, for_each_index, kl_divergence, Bits, Distribution, JointTable, ZERO_MASS};
use crate::error::{Error, Result};
use crate::union::analytic_upper_bound;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicReport {
    pub i_whole: Bits,
    pub i_singletons: Vec<Bits>,
    pub i_max: Bits,
    pub s_max: Bits,
    pub wms: Bits,
    pub delta_i: Bits,
}

fn require_synergy_arity(table: &JointTable) -> Result<()> {
    match table.n_predictors() {
        n if n < 2 => Err(Error::TooFewPredictors(n)),
        _ => Ok(()),
    }
}

/// `Σ_y Pr(y) max_i I(X_i : Y = y)`.
pub fn i_max(table: &JointTable) -> Bits {
    let py = table.target_marginal();
    let mut total = 0.0;
    for (y, &p) in py.iter().enumerate() {
        if p <= ZERO_MASS {
            continue;
        }
        let best = (0..table.n_predictors())
            .filter_map(|i| table.specific_surprise_idx(i, y))
            .map(Bits::get)
            .fold(0.0, f64::max);
        total += p * best;
    }
    Bits::new(total)
}

/// Whole information beyond the state-dependent maximum of the singletons.
pub fn s_max(table: &JointTable) -> Result<Bits> {
    require_synergy_arity(table)?;
    Ok(Bits::new(table.whole_information().get() - i_max(table).get()))
}

/// `I(X_1…X_n : Y) − Σ I(X_i : Y)`; negative values indicate redundancy.
pub fn wms(table: &JointTable) -> Result<Bits> {
    require_synergy_arity(table)?;
    let sum: f64 = (0..table.n_predictors())
        .map(|i| table.singleton_information(i).get())
        .sum();
    let value = table.whole_information().get() - sum;
    debug_assert!(
        (value - wms_via_total_correlation(table)?.get()).abs() < 1e-9,
        "WholeMinusSum forms disagree"
    );
    Ok(Bits::new(value))
}

/// WholeMinusSum as `TC(X_1;…;X_n | Y) − TC(X_1;…;X_n)`.
pub fn wms_via_total_correlation(table: &JointTable) -> Result<Bits> {
    require_synergy_arity(table)?;
    let names = table.predictor_names();
    let conditional = table.total_correlation(&names, Some(table.target_name()))?;
    let plain = table.total_correlation(&names, None)?;
    Ok(Bits::new(conditional.get() - plain.get()))
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Correlational importance: `D_KL(Pr(Y | x) ‖ Pr_ind(Y | x))` averaged over `x`,
/// where `Pr_ind(y | x) ∝ Pr(y) Π Pr(x_i | y)`.
pub fn delta_i(table: &JointTable) -> Result<Bits> {
    require_synergy_arity(table)?;
    let n = table.n_predictors();
    let shape = table.shape();
    let ny = shape[n];
    let py = table.target_marginal();
    let conditionals: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut c = table.pair_marginal(i);
            for (k, v) in c.iter_mut().enumerate() {
                let y = k % ny;
                *v = if py[y] > ZERO_MASS { *v / py[y] } else { 0.0 };
            }
            c
        })
        .collect();

    let mut terms = Vec::new();
    let mut full = vec![0; n + 1];
    for_each_index(&shape[..n], |x| {
        full[..n].copy_from_slice(x);
        let joint: Vec<f64> = (0..ny)
            .map(|y| {
                full[n] = y;
                table.mass()[flat_index(&shape, &full)]
            })
            .collect();
        let px: f64 = joint.iter().sum();
        if px <= ZERO_MASS {
            return;
        }
        let independent: Vec<f64> = (0..ny)
            .map(|y| {
                (0..n).fold(py[y], |acc, i| acc * conditionals[i][x[i] * ny + y])
            })
            .collect();
        let norm = compensated_sum(independent.iter().copied());
        if norm <= 0.0 {
            return;
        }
        for y in 0..ny {
            if joint[y] <= ZERO_MASS {
                continue;
            }
            let posterior = joint[y] / px;
            let ind = independent[y] / norm;
            terms.push(joint[y] * (posterior / ind).log2());
        }
    });
    let value = compensated_sum(terms);
    debug_assert!(
        (value - delta_i_via_total_correlation(table)?.get()).abs() < 1e-9,
        "correlational importance forms disagree"
    );
    Ok(Bits::new(value))
}

/// `ΔI` as `TC(X_1;…;X_n | Y) − D_KL(Pr(X) ‖ Σ_y Pr(y) Π Pr(X_i | y))`.
pub fn delta_i_via_total_correlation(table: &JointTable) -> Result<Bits> {
    require_synergy_arity(table)?;
    let names = table.predictor_names();
    let tc = table.total_correlation(&names, Some(table.target_name()))?;
    let independent = analytic_upper_bound(table);
    let px: Distribution = table.marginal(&names)?;
    let qx: Distribution = independent.marginal(&names)?;
    Ok(Bits::new(tc.get() - kl_divergence(&px, &qx)?.get()))
}

pub fn classic_report(table: &JointTable) -> Result<ClassicReport> {
    require_synergy_arity(table)?;
    let i_singletons = (0..table.n_predictors())
        .map(|i| table.singleton_information(i))
        .collect();
    Ok(ClassicReport {
        i_whole: table.whole_information(),
        i_singletons,
        i_max: i_max(table),
        s_max: s_max(table)?,
        wms: wms(table)?,
        delta_i: delta_i(table)?,
    })
}
