//! The ten canonical examples, built from their gate logic.
//!
//! Each example draws independent uniform source wires and derives the
//! predictor and target labels from them. State alphabets are ordered the same
//! way the bundled `.circ` descriptions order them, so a compiled circuit and
//! the corresponding built table compare equal.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dist::{for_each_index, JointTable, VariableAxis};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ExampleId {
    Rdn,
    Unq,
    Xor,
    XorDuplicate,
    XorLoses,
    RdnXor,
    And,
    RdnUnqXor,
    AndDuplicate,
    XorMultiCoal,
}

impl ExampleId {
    /// Canonical order, matching the reproduction table.
    pub const ALL: [ExampleId; 10] = [
        ExampleId::Rdn,
        ExampleId::Unq,
        ExampleId::Xor,
        ExampleId::XorDuplicate,
        ExampleId::XorLoses,
        ExampleId::RdnXor,
        ExampleId::And,
        ExampleId::RdnUnqXor,
        ExampleId::AndDuplicate,
        ExampleId::XorMultiCoal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExampleId::Rdn => "Rdn",
            ExampleId::Unq => "Unq",
            ExampleId::Xor => "Xor",
            ExampleId::XorDuplicate => "XorDuplicate",
            ExampleId::XorLoses => "XorLoses",
            ExampleId::RdnXor => "RdnXor",
            ExampleId::And => "And",
            ExampleId::RdnUnqXor => "RdnUnqXor",
            ExampleId::AndDuplicate => "AndDuplicate",
            ExampleId::XorMultiCoal => "XorMultiCoal",
        }
    }

    /// The bundled circuit description that compiles to this example.
    pub fn circuit_source(self) -> &'static str {
        match self {
            ExampleId::Rdn => include_str!("../circuits/rdn.circ"),
            ExampleId::Unq => include_str!("../circuits/unq.circ"),
            ExampleId::Xor => include_str!("../circuits/xor.circ"),
            ExampleId::XorDuplicate => include_str!("../circuits/xor_duplicate.circ"),
            ExampleId::XorLoses => include_str!("../circuits/xor_loses.circ"),
            ExampleId::RdnXor => include_str!("../circuits/rdn_xor.circ"),
            ExampleId::And => include_str!("../circuits/and.circ"),
            ExampleId::RdnUnqXor => include_str!("../circuits/rdn_unq_xor.circ"),
            ExampleId::AndDuplicate => include_str!("../circuits/and_duplicate.circ"),
            ExampleId::XorMultiCoal => include_str!("../circuits/xor_multi_coal.circ"),
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleId {
    type Err = Error;

    /// Case-insensitive; `-` and `_` are ignored (`xor-duplicate` works).
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .flat_map(char::to_lowercase)
            .collect();
        ExampleId::ALL
            .into_iter()
            .find(|id| id.name().to_lowercase() == key)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown example `{s}`")))
    }
}

/// A uniform source wire with its printed labels.
struct Wire(&'static [&'static str]);

const BIT: Wire = Wire(&["0", "1"]);
const LETTER_R: Wire = Wire(&["r", "R"]);
const LETTER_A: Wire = Wire(&["a", "A"]);
const LETTER_B: Wire = Wire(&["b", "B"]);
const LETTER_C: Wire = Wire(&["c", "C"]);

/// Labels of the concatenated product of wires, first wire varying slowest.
fn concat_states(wires: &[&Wire]) -> Vec<String> {
    let shape: Vec<usize> = wires.iter().map(|w| w.0.len()).collect();
    let mut out = Vec::new();
    for_each_index(&shape, |idx| {
        out.push(
            idx.iter()
                .zip(wires)
                .map(|(&i, w)| w.0[i])
                .collect::<String>(),
        );
    });
    out
}

fn axis(name: &str, states: Vec<String>) -> VariableAxis {
    VariableAxis::new(name, states).expect("corpus axes are well formed")
}

fn bit_axis(name: &str) -> VariableAxis {
    axis(name, concat_states(&[&BIT]))
}

/// Enumerates every assignment of the uniform `sources` and accumulates equal
/// mass in the cell whose labels `row` produces (one label per axis).
fn from_sources(
    sources: &[&Wire],
    predictors: Vec<VariableAxis>,
    target: VariableAxis,
    row: impl Fn(&[&str]) -> Vec<String>,
) -> JointTable {
    let shape: Vec<usize> = sources.iter().map(|w| w.0.len()).collect();
    let count: usize = shape.iter().product();
    let mut axes = predictors;
    axes.push(target);
    let dims: Vec<usize> = axes.iter().map(VariableAxis::len).collect();
    let mut mass = vec![0.0; dims.iter().product()];
    for_each_index(&shape, |idx| {
        let labels: Vec<&str> = idx.iter().zip(sources).map(|(&i, w)| w.0[i]).collect();
        let cell = row(&labels);
        let flat = cell
            .iter()
            .zip(&axes)
            .fold(0, |acc, (label, a)| {
                acc * a.len() + a.state_index(label).expect("label in alphabet")
            });
        mass[flat] += 1.0 / count as f64;
    });
    let target = axes.pop().expect("target axis");
    JointTable::new(axes, target, mass).expect("corpus tables are normalized")
}

fn xor(a: &str, b: &str) -> String {
    ((a == "1") ^ (b == "1")).then_some("1").unwrap_or("0").to_string()
}

fn upper(s: &str) -> bool {
    s.chars().all(char::is_uppercase)
}

pub fn build_example(id: ExampleId) -> JointTable {
    match id {
        ExampleId::Rdn => from_sources(
            &[&LETTER_R],
            vec![axis("X1", concat_states(&[&LETTER_R])), axis("X2", concat_states(&[&LETTER_R]))],
            axis("Y", concat_states(&[&LETTER_R])),
            |s| vec![s[0].into(), s[0].into(), s[0].into()],
        ),
        ExampleId::Unq => from_sources(
            &[&LETTER_A, &LETTER_B],
            vec![axis("X1", concat_states(&[&LETTER_A])), axis("X2", concat_states(&[&LETTER_B]))],
            axis("Y", concat_states(&[&LETTER_A, &LETTER_B])),
            |s| vec![s[0].into(), s[1].into(), format!("{}{}", s[0], s[1])],
        ),
        ExampleId::Xor => from_sources(
            &[&BIT, &BIT],
            vec![bit_axis("X1"), bit_axis("X2")],
            bit_axis("Y"),
            |s| vec![s[0].into(), s[1].into(), xor(s[0], s[1])],
        ),
        ExampleId::XorDuplicate => from_sources(
            &[&BIT, &BIT],
            vec![bit_axis("X1"), bit_axis("X2"), bit_axis("X3")],
            bit_axis("Y"),
            |s| vec![s[0].into(), s[1].into(), s[0].into(), xor(s[0], s[1])],
        ),
        ExampleId::XorLoses => from_sources(
            &[&BIT, &BIT],
            vec![bit_axis("X1"), bit_axis("X2"), bit_axis("X3")],
            bit_axis("Y"),
            |s| vec![s[0].into(), s[1].into(), xor(s[0], s[1]), xor(s[0], s[1])],
        ),
        ExampleId::RdnXor => from_sources(
            &[&LETTER_R, &BIT, &BIT],
            vec![
                axis("X1", concat_states(&[&LETTER_R, &BIT])),
                axis("X2", concat_states(&[&LETTER_R, &BIT])),
            ],
            axis("Y", concat_states(&[&LETTER_R, &BIT])),
            |s| {
                vec![
                    format!("{}{}", s[0], s[1]),
                    format!("{}{}", s[0], s[2]),
                    format!("{}{}", s[0], xor(s[1], s[2])),
                ]
            },
        ),
        ExampleId::And => from_sources(
            &[&BIT, &BIT],
            vec![bit_axis("X1"), bit_axis("X2")],
            bit_axis("Y"),
            |s| vec![s[0].into(), s[1].into(), and(s[0], s[1])],
        ),
        ExampleId::RdnUnqXor => from_sources(
            &[&LETTER_R, &LETTER_A, &LETTER_B, &BIT, &BIT],
            vec![
                axis("X1", concat_states(&[&LETTER_R, &LETTER_A, &BIT])),
                axis("X2", concat_states(&[&LETTER_R, &LETTER_B, &BIT])),
            ],
            axis("Y", concat_states(&[&LETTER_R, &LETTER_A, &LETTER_B, &BIT])),
            |s| {
                vec![
                    format!("{}{}{}", s[0], s[1], s[3]),
                    format!("{}{}{}", s[0], s[2], s[4]),
                    format!("{}{}{}{}", s[0], s[1], s[2], xor(s[3], s[4])),
                ]
            },
        ),
        ExampleId::AndDuplicate => from_sources(
            &[&BIT, &BIT],
            vec![bit_axis("X1"), bit_axis("X2"), bit_axis("X3")],
            bit_axis("Y"),
            |s| vec![s[0].into(), s[1].into(), s[0].into(), and(s[0], s[1])],
        ),
        ExampleId::XorMultiCoal => from_sources(
            &[&LETTER_A, &LETTER_B, &LETTER_C],
            vec![
                axis("X1", concat_states(&[&LETTER_A, &LETTER_B])),
                axis("X2", concat_states(&[&LETTER_A, &LETTER_C])),
                axis("X3", concat_states(&[&LETTER_B, &LETTER_C])),
            ],
            bit_axis("Y"),
            |s| {
                let parity = s.iter().filter(|w| upper(w)).count() % 2;
                vec![
                    format!("{}{}", s[0], s[1]),
                    format!("{}{}", s[0], s[2]),
                    format!("{}{}", s[1], s[2]),
                    parity.to_string(),
                ]
            },
        ),
    }
}

fn and(a: &str, b: &str) -> String {
    if a == "1" && b == "1" { "1" } else { "0" }.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(preds: &[&str], y: &str) -> (Vec<String>, String) {
        (preds.iter().map(|s| s.to_string()).collect(), y.to_string())
    }

    /// Rows transcribed from the printed figures: (predictor labels, target, mass).
    fn transcribed(id: ExampleId) -> (Vec<(Vec<String>, String)>, f64) {
        let rows = match id {
            ExampleId::Rdn => vec![row(&["r", "r"], "r"), row(&["R", "R"], "R")],
            ExampleId::Unq => vec![
                row(&["a", "b"], "ab"),
                row(&["a", "B"], "aB"),
                row(&["A", "b"], "Ab"),
                row(&["A", "B"], "AB"),
            ],
            ExampleId::Xor => vec![
                row(&["0", "0"], "0"),
                row(&["0", "1"], "1"),
                row(&["1", "0"], "1"),
                row(&["1", "1"], "0"),
            ],
            ExampleId::XorDuplicate => vec![
                row(&["0", "0", "0"], "0"),
                row(&["0", "1", "0"], "1"),
                row(&["1", "0", "1"], "1"),
                row(&["1", "1", "1"], "0"),
            ],
            ExampleId::XorLoses => vec![
                row(&["0", "0", "0"], "0"),
                row(&["0", "1", "1"], "1"),
                row(&["1", "0", "1"], "1"),
                row(&["1", "1", "0"], "0"),
            ],
            ExampleId::RdnXor => vec![
                row(&["r0", "r0"], "r0"),
                row(&["r0", "r1"], "r1"),
                row(&["r1", "r0"], "r1"),
                row(&["r1", "r1"], "r0"),
                row(&["R0", "R0"], "R0"),
                row(&["R0", "R1"], "R1"),
                row(&["R1", "R0"], "R1"),
                row(&["R1", "R1"], "R0"),
            ],
            ExampleId::And => vec![
                row(&["0", "0"], "0"),
                row(&["0", "1"], "0"),
                row(&["1", "0"], "0"),
                row(&["1", "1"], "1"),
            ],
            ExampleId::RdnUnqXor => {
                let mut rows = Vec::new();
                for r in ["r", "R"] {
                    for (a, b) in [("a", "b"), ("a", "B"), ("A", "b"), ("A", "B")] {
                        for (u, v, d) in [("0", "0", "0"), ("0", "1", "1"), ("1", "0", "1"), ("1", "1", "0")] {
                            rows.push((
                                vec![format!("{r}{a}{u}"), format!("{r}{b}{v}")],
                                format!("{r}{a}{b}{d}"),
                            ));
                        }
                    }
                }
                rows
            }
            ExampleId::AndDuplicate => vec![
                row(&["0", "0", "0"], "0"),
                row(&["0", "1", "0"], "0"),
                row(&["1", "0", "1"], "0"),
                row(&["1", "1", "1"], "1"),
            ],
            ExampleId::XorMultiCoal => vec![
                row(&["ab", "ac", "bc"], "0"),
                row(&["AB", "Ac", "Bc"], "0"),
                row(&["Ab", "AC", "bC"], "0"),
                row(&["aB", "aC", "BC"], "0"),
                row(&["Ab", "Ac", "bc"], "1"),
                row(&["aB", "ac", "Bc"], "1"),
                row(&["ab", "aC", "bC"], "1"),
                row(&["AB", "AC", "BC"], "1"),
            ],
        };
        let mass = 1.0 / rows.len() as f64;
        (rows, mass)
    }

    #[test]
    fn built_tables_match_transcribed_figures() {
        for id in ExampleId::ALL {
            let table = build_example(id);
            let (rows, mass) = transcribed(id);
            let mut listed = 0.0;
            for (preds, y) in &rows {
                let mut idx: Vec<usize> = preds
                    .iter()
                    .zip(table.predictors())
                    .map(|(l, a)| a.state_index(l).unwrap_or_else(|| panic!("{id}: {l}")))
                    .collect();
                idx.push(table.target().state_index(y).unwrap());
                assert_eq!(table.prob(&idx), mass, "{id} row {preds:?} {y}");
                listed += mass;
            }
            assert_eq!(listed, 1.0, "{id}");
            let positive = table.mass().iter().filter(|&&p| p > 0.0).count();
            assert_eq!(positive, rows.len(), "{id} has unlisted positive cells");
        }
    }

    #[test]
    fn masses_sum_to_exactly_one() {
        for id in ExampleId::ALL {
            let total: f64 = build_example(id).mass().iter().sum();
            assert_eq!(total, 1.0, "{id}");
        }
    }

    #[test]
    fn structural_identities() {
        let dup = build_example(ExampleId::XorDuplicate);
        for (idx, p) in dup.cells() {
            if p > 0.0 {
                assert_eq!(idx[2], idx[0]);
            }
        }
        let loses = build_example(ExampleId::XorLoses);
        for (idx, p) in loses.cells() {
            if p > 0.0 {
                assert_eq!(idx[2], idx[0] ^ idx[1]);
            }
        }
        let multi = build_example(ExampleId::XorMultiCoal);
        for pair in [["X1", "X2"], ["X1", "X3"], ["X2", "X3"]] {
            let i = multi.mutual_information(&pair, &["Y"]).unwrap().get();
            assert!((i - 1.0).abs() < 1e-12, "{pair:?}: {i}");
        }
    }

    #[test]
    fn example_counts() {
        assert_eq!(build_example(ExampleId::Xor).mass().iter().filter(|&&p| p > 0.0).count(), 4);
        assert_eq!(build_example(ExampleId::RdnXor).mass().iter().filter(|&&p| p == 0.125).count(), 8);
        assert_eq!(
            build_example(ExampleId::RdnUnqXor).mass().iter().filter(|&&p| p == 1.0 / 32.0).count(),
            32
        );
    }

    #[test]
    fn parses_ids() {
        assert_eq!("xor".parse::<ExampleId>().unwrap(), ExampleId::Xor);
        assert_eq!("rdn-unq-xor".parse::<ExampleId>().unwrap(), ExampleId::RdnUnqXor);
        assert_eq!("AndDuplicate".parse::<ExampleId>().unwrap(), ExampleId::AndDuplicate);
        assert!("nand".parse::<ExampleId>().is_err());
    }
}
