//! The per-distribution report shared by `compute` and `table1`.

use serde::Serialize;
use sha2::{Digest, Sha256};
use synergy_core::{
    classic_report, minimize_union_information, s_max, Bits, Error, JointTable, OptimizerConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputIdentity {
    /// `example`, `tsv` or `circuit`.
    pub kind: String,
    pub name: String,
    pub sha256: String,
}

impl InputIdentity {
    pub fn new(kind: &str, name: &str, content: &[u8]) -> Self {
        Self {
            kind: kind.to_string(),
            name: name.to_string(),
            sha256: hex::encode(Sha256::digest(content)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnionBounds {
    pub upper_bound: Bits,
    pub best: Bits,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynergyInterval {
    pub lower: Bits,
    pub best: Bits,
    pub upper: Bits,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regions {
    pub redundancy: Bits,
    pub unique1: Bits,
    pub unique2: Bits,
    pub synergy: Bits,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerMeta {
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance_bits: f64,
    pub seed: u64,
    pub converged: bool,
}

/// Every measure for one distribution. Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub input: InputIdentity,
    pub n: usize,
    pub predictors: Vec<String>,
    pub target: String,
    pub alphabet_sizes: Vec<usize>,
    pub i_whole: Bits,
    pub i_singletons: Vec<Bits>,
    pub s_max: Bits,
    pub wms: Bits,
    pub delta_i: Bits,
    pub i_vk: UnionBounds,
    pub s_vk: SynergyInterval,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pid2: Option<Regions>,
    pub optimizer: OptimizerMeta,
}

pub fn measure(
    table: &JointTable,
    input: InputIdentity,
    cfg: &OptimizerConfig,
    with_pid2: bool,
) -> Result<MeasureReport, Error> {
    let n = table.n_predictors();
    if with_pid2 && n != 2 {
        return Err(Error::PredictorCount { expected: 2, found: n });
    }
    let classic = classic_report(table)?;
    let union = minimize_union_information(table, cfg)?;
    let whole = classic.i_whole.get();
    let s_vk = SynergyInterval {
        lower: Bits::new(whole - union.upper_bound_value.get()),
        best: Bits::new(whole - union.best_value.get()),
        upper: s_max(table)?,
    };
    let pid2 = with_pid2.then(|| {
        let i1 = classic.i_singletons[0].get();
        let i2 = classic.i_singletons[1].get();
        let redundancy = i1 + i2 - union.best_value.get();
        Regions {
            redundancy: Bits::new(redundancy),
            unique1: Bits::new(i1 - redundancy),
            unique2: Bits::new(i2 - redundancy),
            synergy: s_vk.best,
        }
    });
    Ok(MeasureReport {
        input,
        n,
        predictors: table.predictor_names().iter().map(|s| s.to_string()).collect(),
        target: table.target_name().to_string(),
        alphabet_sizes: table.shape(),
        i_whole: classic.i_whole,
        i_singletons: classic.i_singletons,
        s_max: classic.s_max,
        wms: classic.wms,
        delta_i: classic.delta_i,
        i_vk: UnionBounds {
            upper_bound: union.upper_bound_value,
            best: union.best_value,
        },
        s_vk,
        pid2,
        optimizer: OptimizerMeta {
            restarts: cfg.restarts,
            max_iterations: cfg.max_iterations,
            tolerance_bits: cfg.tolerance_bits,
            seed: cfg.seed,
            converged: union.converged,
        },
    })
}

fn f6(b: Bits) -> String {
    format!("{:.6}", b.get())
}

/// Human-readable rendering with six decimals.
pub fn render_table(r: &MeasureReport) -> String {
    let mut lines = vec![
        format!("input       {} {} (sha256 {})", r.input.kind, r.input.name, &r.input.sha256[..12]),
        format!(
            "variables   {} -> {}  (alphabets {})",
            r.predictors.join(" "),
            r.target,
            r.alphabet_sizes
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join("x")
        ),
        format!("I(X:Y)      {}", f6(r.i_whole)),
    ];
    for (name, i) in r.predictors.iter().zip(&r.i_singletons) {
        lines.push(format!("I({name}:Y){}{}", " ".repeat(8usize.saturating_sub(name.len())), f6(*i)));
    }
    lines.extend([
        format!("S_max       {}", f6(r.s_max)),
        format!("WMS         {}", f6(r.wms)),
        format!("ΔI          {}", f6(r.delta_i)),
        format!("I_VK        {}  (upper bound {})", f6(r.i_vk.best), f6(r.i_vk.upper_bound)),
        format!(
            "S_VK        {}  in [{}, {}]",
            f6(r.s_vk.best),
            f6(r.s_vk.lower),
            f6(r.s_vk.upper)
        ),
    ]);
    if let Some(p) = &r.pid2 {
        lines.push(format!(
            "PID         redundancy {}  unique1 {}  unique2 {}  synergy {}",
            f6(p.redundancy),
            f6(p.unique1),
            f6(p.unique2),
            f6(p.synergy)
        ));
    }
    lines.push(format!(
        "optimizer   restarts {} seed {} converged {}",
        r.optimizer.restarts, r.optimizer.seed, r.optimizer.converged
    ));
    lines.join("\n") + "\n"
}
