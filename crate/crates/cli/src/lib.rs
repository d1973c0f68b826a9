//! Library side of the `synergy` command: input loading, reports, and the
//! reproduction table.

pub mod report;
pub mod table1;
pub mod tsv;

use std::fmt;
use std::path::Path;

use synergy_core::{build_example, compile_text, Error, ExampleId, JointTable};

use report::InputIdentity;

/// A command failure and the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or invalid input (exit 2).
    Input(String),
    /// A reproduction check disagreed with the expected values (exit 1).
    Check(String),
    /// Anything else that stopped the computation (exit 1).
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Check(_) | Failure::Runtime(_) => 1,
        }
    }

    /// Sorts a core error into input problems and everything else.
    pub fn from_core(e: Error) -> Self {
        match e {
            Error::ProjectionFailed { .. }
            | Error::NonFiniteObjective
            | Error::InconsistentConstraints(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Check(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

pub fn load_example(name: &str) -> Result<(JointTable, InputIdentity), Failure> {
    let id: ExampleId = name.parse().map_err(Failure::from_core)?;
    let table = build_example(id);
    let identity = InputIdentity::new("example", id.name(), tsv::dump_tsv(&table).as_bytes());
    Ok((table, identity))
}

/// Loads a `.tsv` distribution or a `.circ` circuit, chosen by extension.
pub fn load_file(path: &Path, renormalize: bool) -> Result<(JointTable, InputIdentity), Failure> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{shown}: {e}")))?;
    let with_path = |e: Error| Failure::Input(format!("{shown}:{e}"));
    let (kind, table) = match path.extension().and_then(|e| e.to_str()) {
        Some("circ") => ("circuit", compile_text(&text).map_err(|e| match e {
            Error::Circuit(_) => with_path(e),
            other => Failure::Input(format!("{shown}: {other}")),
        })?),
        Some("tsv") | Some("txt") | None => (
            "tsv",
            tsv::load_tsv(&text, renormalize)
                .map_err(|e| Failure::Input(format!("{shown}: {e}")))?,
        ),
        Some(other) => {
            return Err(Failure::Input(format!(
                "{shown}: unsupported extension `.{other}` (expected .tsv or .circ)"
            )))
        }
    };
    Ok((table, InputIdentity::new(kind, &shown, text.as_bytes())))
}

/// Parses and compiles a circuit file, returning a one-line summary.
pub fn circuit_check(path: &Path) -> Result<String, Failure> {
    let (table, _) = load_file(path, false)?;
    let positive = table.mass().iter().filter(|&&p| p > 0.0).count();
    Ok(format!(
        "{}: ok, {} -> {}, {positive} rows with positive mass",
        path.display(),
        table.predictor_names().join(" "),
        table.target_name()
    ))
}

/// `name  predictors  rows` for every example.
pub fn examples_list() -> String {
    ExampleId::ALL
        .iter()
        .map(|&id| {
            let t = build_example(id);
            let rows = t.mass().iter().filter(|&&p| p > 0.0).count();
            format!("{:<14}n={}  rows={rows}\n", id.name(), t.n_predictors())
        })
        .collect()
}
