//! Tab-separated distribution files.
//!
//! ```text
//! # optional alphabet declarations keep zero-mass states and their order
//! #@ axis X1 0 1
//! X1	X2	Y	p
//! 0	0	0	1/4
//! 0	1	1	0.25
//! ```
//!
//! The last column is the probability (`p`), the one before it is the target,
//! and every earlier column is a predictor. Unlisted cells have mass zero.

use std::collections::HashMap;

use synergy_core::{Error, JointTable, VariableAxis};

/// Largest deviation from 1 that `--renormalize` will rescale away.
pub const RENORMALIZE_LIMIT: f64 = 1e-3;

const DIRECTIVE: &str = "#@ axis";

fn parse_probability(text: &str) -> Option<f64> {
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let den: f64 = den.trim().parse().ok()?;
            if den == 0.0 {
                return None;
            }
            num.trim().parse::<f64>().ok()? / den
        }
        None => text.parse().ok()?,
    };
    value.is_finite().then_some(value)
}

fn input_error(line: usize, message: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("line {line}: {message}"))
}

pub fn load_tsv(text: &str, renormalize: bool) -> Result<JointTable, Error> {
    let mut declared: HashMap<String, Vec<String>> = HashMap::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<(usize, Vec<String>, f64)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim_end_matches('\r');
        if let Some(rest) = line.strip_prefix(DIRECTIVE) {
            let mut words = rest.split_whitespace();
            let name = words
                .next()
                .ok_or_else(|| input_error(line_no, "axis directive needs a name"))?;
            let states: Vec<String> = words.map(str::to_string).collect();
            if declared.insert(name.to_string(), states).is_some() {
                return Err(input_error(line_no, format!("axis `{name}` declared twice")));
            }
            continue;
        }
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let cells: Vec<String> = line.split('\t').map(|c| c.trim().to_string()).collect();
        match &header {
            None => {
                if cells.len() < 3 {
                    return Err(input_error(
                        line_no,
                        "header needs at least one predictor, a target and `p`",
                    ));
                }
                if cells.last().map(String::as_str) != Some("p") {
                    return Err(input_error(line_no, "last header column must be `p`"));
                }
                header = Some(cells);
            }
            Some(h) => {
                if cells.len() != h.len() {
                    return Err(input_error(
                        line_no,
                        format!("expected {} columns, found {}", h.len(), cells.len()),
                    ));
                }
                let p_text = cells.last().expect("non-empty row");
                let p = parse_probability(p_text)
                    .ok_or_else(|| input_error(line_no, format!("bad probability `{p_text}`")))?;
                if p < 0.0 {
                    return Err(input_error(line_no, format!("negative probability {p}")));
                }
                rows.push((line_no, cells[..cells.len() - 1].to_vec(), p));
            }
        }
    }
    let header = header.ok_or_else(|| Error::InvalidArgument("no header row".into()))?;
    let names = &header[..header.len() - 1];
    if let Some(extra) = declared.keys().find(|d| !names.contains(d)) {
        return Err(Error::InvalidArgument(format!(
            "axis directive for unknown column `{extra}`"
        )));
    }

    let mut alphabets: Vec<Vec<String>> = names
        .iter()
        .map(|n| declared.get(n).cloned().unwrap_or_default())
        .collect();
    for (line_no, labels, _) in &rows {
        for (a, label) in labels.iter().enumerate() {
            if alphabets[a].contains(label) {
                continue;
            }
            if declared.contains_key(&names[a]) {
                return Err(input_error(
                    *line_no,
                    format!("state `{label}` is not declared for `{}`", names[a]),
                ));
            }
            alphabets[a].push(label.clone());
        }
    }
    let axes: Vec<VariableAxis> = names
        .iter()
        .zip(alphabets)
        .map(|(n, states)| VariableAxis::new(n.as_str(), states))
        .collect::<Result<_, _>>()?;
    let dims: Vec<usize> = axes.iter().map(VariableAxis::len).collect();
    let mut mass = vec![0.0; dims.iter().product()];
    let mut seen = vec![false; mass.len()];
    for (line_no, labels, p) in &rows {
        let flat = labels.iter().zip(&axes).fold(0, |acc, (l, a)| {
            acc * a.len() + a.state_index(l).expect("label collected above")
        });
        if std::mem::replace(&mut seen[flat], true) {
            return Err(input_error(*line_no, "duplicate row"));
        }
        mass[flat] = *p;
    }
    if renormalize {
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() < RENORMALIZE_LIMIT && total > 0.0 {
            mass.iter_mut().for_each(|m| *m /= total);
        }
    }
    let mut axes = axes;
    let target = axes.pop().expect("at least two axes");
    JointTable::new(axes, target, mass)
}

/// Writes every alphabet as a directive, then one row per positive cell with
/// the mass at full precision, so loading the output reproduces the table.
pub fn dump_tsv(table: &JointTable) -> String {
    let mut out = String::new();
    for axis in table.axes() {
        out.push_str(DIRECTIVE);
        out.push(' ');
        out.push_str(axis.name());
        for s in axis.states() {
            out.push(' ');
            out.push_str(s);
        }
        out.push('\n');
    }
    let names: Vec<&str> = table.axes().iter().map(VariableAxis::name).collect();
    out.push_str(&names.join("\t"));
    out.push_str("\tp\n");
    for (idx, p) in table.cells() {
        if p <= 0.0 {
            continue;
        }
        for (a, &s) in table.axes().iter().zip(&idx) {
            out.push_str(&a.states()[s]);
            out.push('\t');
        }
        out.push_str(&format!("{p}\n"));
    }
    out
}
