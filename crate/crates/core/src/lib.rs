//! Information-theoretic measures of synergy among discrete predictors of a
//! target: the classic `S_max`, WholeMinusSum and `ΔI` measures, union and
//! intersection information with the synergy they induce, a two-predictor
//! partial information decomposition, a canonical example corpus, and a small
//! circuit language for building new examples.

pub mod circuit;
pub mod classic;
pub mod corpus;
pub mod dist;
pub mod error;
pub mod optimize;
pub mod union;

pub use circuit::{compile_circuit, compile_text, parse_circuit, CircuitSpec};
pub use classic::{classic_report, delta_i, i_max, s_max, wms, ClassicReport};
pub use corpus::{build_example, ExampleId};
pub use dist::{kl_divergence, Bits, Distribution, JointTable, VariableAxis};
pub use error::{CircuitError, Error, Result};
pub use optimize::OptimizerConfig;
pub use union::{
    analytic_upper_bound, intersection_information, minimize_union_information, pid2, s_vk,
    union_upper_bound,
    Pid2, SvkInterval, UnionInfoResult,
};
