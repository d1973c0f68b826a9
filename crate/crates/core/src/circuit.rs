//! A line-oriented language for deterministic gate circuits over independent
//! source wires, compiled to a [`JointTable`].
//!
//! ```text
//! # Xor
//! source a uniform(2)
//! source b uniform(2)
//! X1 := COPY(a)
//! X2 := COPY(b)
//! Y := XOR(a, b)
//! predictors: X1 X2
//! target: Y
//! ```
//!
//! Sources take `uniform(k)` or `dist(p1, …, pk)` (decimals or `a/b`
//! fractions), optionally followed by `labels(l1, …, lk)`; unlabelled states
//! are `0…k-1`. Logic gates read a two-state wire's first state as false and
//! emit the labels `0` and `1`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::dist::{for_each_index, JointTable, VariableAxis, NORMALIZATION_TOLERANCE};
use crate::error::{CircuitError, Error, Result};

/// Largest number of joint source assignments `compile_circuit` enumerates.
pub const MAX_ASSIGNMENTS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Gate {
    Xor,
    And,
    Or,
    Not,
    Copy,
    Concat,
}

impl Gate {
    fn parse(word: &str) -> Option<Gate> {
        Some(match word {
            "XOR" => Gate::Xor,
            "AND" => Gate::And,
            "OR" => Gate::Or,
            "NOT" => Gate::Not,
            "COPY" => Gate::Copy,
            "CONCAT" => Gate::Concat,
            _ => return None,
        })
    }

    fn is_logic(self) -> bool {
        matches!(self, Gate::Xor | Gate::And | Gate::Or | Gate::Not)
    }

    fn arity(self) -> (usize, Option<usize>) {
        match self {
            Gate::Xor | Gate::And | Gate::Or => (2, None),
            Gate::Not | Gate::Copy => (1, Some(1)),
            Gate::Concat => (1, None),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gate::Xor => "XOR",
            Gate::And => "AND",
            Gate::Or => "OR",
            Gate::Not => "NOT",
            Gate::Copy => "COPY",
            Gate::Concat => "CONCAT",
        })
    }
}

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    fn error(self, message: impl Into<String>) -> CircuitError {
        CircuitError::new(self.line, self.col, message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Source {
    pub name: String,
    pub probabilities: Vec<f64>,
    pub labels: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Definition {
    pub name: String,
    pub gate: Gate,
    pub args: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitSpec {
    pub sources: Vec<Source>,
    pub definitions: Vec<Definition>,
    pub predictors: Vec<String>,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Assign,
    Colon,
    Comma,
    Slash,
    LParen,
    RParen,
    Newline,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Number(s) => write!(f, "`{s}`"),
            Tok::Assign => f.write_str("`:=`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Newline => f.write_str("end of line"),
        }
    }
}

fn lex(text: &str) -> std::result::Result<Vec<(Tok, Pos)>, CircuitError> {
    let mut out = Vec::new();
    for (l, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = Pos { line: l + 1, col: i + 1 };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            let tok = if c.is_ascii_alphabetic() || c == '_' {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            } else if c.is_ascii_digit() || c == '.' {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && matches!(chars[i], 'e' | 'E') {
                    i += 1;
                    if i < chars.len() && matches!(chars[i], '+' | '-') {
                        i += 1;
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                Tok::Number(chars[start..i].iter().collect())
            } else {
                i += 1;
                match c {
                    ':' if chars.get(i) == Some(&'=') => {
                        i += 1;
                        Tok::Assign
                    }
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    '/' => Tok::Slash,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => return Err(pos.error(format!("unexpected character `{c}`"))),
                }
            };
            out.push((tok, pos));
        }
        out.push((Tok::Newline, Pos { line: l + 1, col: chars.len() + 1 }));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

type Parsed<T> = std::result::Result<T, CircuitError>;

impl Parser {
    fn peek(&self) -> Option<&(Tok, Pos)> {
        self.toks.get(self.at)
    }

    fn pos(&self) -> Pos {
        self.peek().map_or(self.end, |t| t.1)
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn unexpected(&self, wanted: &str) -> CircuitError {
        match self.peek() {
            Some((tok, pos)) => pos.error(format!("expected {wanted}, found {tok}")),
            None => self.end.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Parsed<Pos> {
        match self.peek() {
            Some((t, p)) if *t == tok => {
                let p = *p;
                self.at += 1;
                Ok(p)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn ident(&mut self, wanted: &str) -> Parsed<(String, Pos)> {
        match self.peek() {
            Some((Tok::Ident(s), p)) => {
                let out = (s.clone(), *p);
                self.at += 1;
                Ok(out)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn end_of_line(&mut self) -> Parsed<()> {
        self.expect(Tok::Newline, "end of line").map(|_| ())
    }

    /// `( item , item , … )`, at least one item.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Parsed<T>) -> Parsed<Vec<T>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = vec![item(self)?];
        loop {
            match self.peek() {
                Some((Tok::Comma, _)) => {
                    self.at += 1;
                    out.push(item(self)?);
                }
                Some((Tok::RParen, _)) => {
                    self.at += 1;
                    return Ok(out);
                }
                _ => return Err(self.unexpected("`,` or `)`")),
            }
        }
    }

    fn number(&mut self) -> Parsed<(f64, Pos)> {
        let pos = self.pos();
        let read = |p: &mut Self| match p.next() {
            Some((Tok::Number(s), pos)) => s
                .parse::<f64>()
                .map_err(|_| pos.error(format!("malformed number `{s}`"))),
            _ => {
                p.at -= 1;
                Err(p.unexpected("a number"))
            }
        };
        let value = read(self)?;
        if let Some((Tok::Slash, _)) = self.peek() {
            self.at += 1;
            let denom_pos = self.pos();
            let denom = read(self)?;
            if denom == 0.0 {
                return Err(denom_pos.error("division by zero"));
            }
            return Ok((value / denom, pos));
        }
        Ok((value, pos))
    }

    fn label(&mut self) -> Parsed<String> {
        match self.peek() {
            Some((Tok::Ident(s) | Tok::Number(s), _)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("a state label")),
        }
    }

    fn source(&mut self, pos: Pos) -> Parsed<Source> {
        let (name, _) = self.ident("a source name")?;
        let (kind, kind_pos) = self.ident("`uniform` or `dist`")?;
        let probabilities = match kind.as_str() {
            "uniform" => {
                let (k, k_pos) = self.list(|p| p.number())?.into_iter().fold(
                    (Vec::new(), None),
                    |(mut v, first), (x, p)| {
                        v.push(x);
                        (v, first.or(Some(p)))
                    },
                );
                let k_pos = k_pos.expect("list is non-empty");
                if k.len() != 1 || k[0].fract() != 0.0 || k[0] < 1.0 {
                    return Err(k_pos.error("uniform takes one positive integer state count"));
                }
                let k = k[0] as usize;
                vec![1.0 / k as f64; k]
            }
            "dist" => {
                let ps = self.list(|p| p.number())?;
                for &(p, at) in &ps {
                    if !(p.is_finite() && p >= 0.0) {
                        return Err(at.error(format!("probability {p} is not in [0, 1]")));
                    }
                }
                let probs: Vec<f64> = ps.iter().map(|p| p.0).collect();
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                    return Err(kind_pos.error(format!(
                        "dist of `{name}` sums to {total}, not 1"
                    )));
                }
                probs
            }
            _ => return Err(kind_pos.error(format!("expected `uniform` or `dist`, found `{kind}`"))),
        };
        let labels = match self.peek() {
            Some((Tok::Ident(w), p)) if w == "labels" => {
                let p = *p;
                self.at += 1;
                let labels = self.list(|p| p.label())?;
                if labels.len() != probabilities.len() {
                    return Err(p.error(format!(
                        "`{name}` has {} states but {} labels",
                        probabilities.len(),
                        labels.len()
                    )));
                }
                let mut seen = HashSet::new();
                if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
                    return Err(p.error(format!("label `{dup}` repeated on `{name}`")));
                }
                labels
            }
            _ => (0..probabilities.len()).map(|i| i.to_string()).collect(),
        };
        self.end_of_line()?;
        Ok(Source {
            name,
            probabilities,
            labels,
            pos,
        })
    }

    fn definition(&mut self, name: String, pos: Pos) -> Parsed<Definition> {
        self.expect(Tok::Assign, "`:=`")?;
        let (op, op_pos) = self.ident("a gate name")?;
        let gate = Gate::parse(&op).ok_or_else(|| {
            op_pos.error(format!(
                "unknown gate `{op}` (expected XOR, AND, OR, NOT, COPY or CONCAT)"
            ))
        })?;
        let args: Vec<String> = self.list(|p| p.ident("a wire name").map(|a| a.0))?;
        let (min, max) = gate.arity();
        if args.len() < min || max.is_some_and(|m| args.len() > m) {
            let want = match max {
                Some(m) if m == min => format!("exactly {min}"),
                _ => format!("at least {min}"),
            };
            return Err(op_pos.error(format!(
                "{gate} takes {want} argument(s), found {}",
                args.len()
            )));
        }
        self.end_of_line()?;
        Ok(Definition {
            name,
            gate,
            args,
            pos,
        })
    }
}

/// Parses and validates a circuit description.
pub fn parse_circuit(text: &str) -> Result<CircuitSpec> {
    Ok(parse(text)?)
}

fn parse(text: &str) -> Parsed<CircuitSpec> {
    let toks = lex(text)?;
    let end = toks.last().map_or(Pos { line: 1, col: 1 }, |t| t.1);
    let mut p = Parser { toks, at: 0, end };
    let mut sources = Vec::new();
    let mut definitions = Vec::new();
    let mut predictors: Option<Vec<(String, Pos)>> = None;
    let mut target: Option<(String, Pos)> = None;
    while let Some((tok, pos)) = p.next() {
        match tok {
            Tok::Newline => continue,
            Tok::Ident(word) => match p.peek() {
                Some((Tok::Assign, _)) => definitions.push(p.definition(word, pos)?),
                Some((Tok::Colon, _)) if word == "predictors" => {
                    p.at += 1;
                    if predictors.is_some() {
                        return Err(pos.error("`predictors` declared twice"));
                    }
                    let mut names = Vec::new();
                    while let Some((Tok::Ident(_), _)) = p.peek() {
                        names.push(p.ident("a wire name")?);
                    }
                    if names.is_empty() {
                        return Err(p.unexpected("a predictor name"));
                    }
                    p.end_of_line()?;
                    predictors = Some(names);
                }
                Some((Tok::Colon, _)) if word == "target" => {
                    p.at += 1;
                    if target.is_some() {
                        return Err(pos.error("`target` declared twice"));
                    }
                    let name = p.ident("a target name")?;
                    p.end_of_line()?;
                    target = Some(name);
                }
                _ if word == "source" => sources.push(p.source(pos)?),
                _ => return Err(p.unexpected("`:=`")),
            },
            other => {
                return Err(pos.error(format!(
                    "expected `source`, a definition, `predictors:` or `target:`, found {other}"
                )))
            }
        }
    }
    let predictors = predictors.ok_or_else(|| end.error("missing `predictors:` line"))?;
    let target = target.ok_or_else(|| end.error("missing `target:` line"))?;
    check(&sources, &definitions, &predictors, &target)?;
    Ok(CircuitSpec {
        sources,
        definitions,
        predictors: predictors.into_iter().map(|n| n.0).collect(),
        target: target.0,
    })
}

enum Wire<'a> {
    Source,
    Gate(&'a Definition),
}

fn check(
    sources: &[Source],
    definitions: &[Definition],
    predictors: &[(String, Pos)],
    target: &(String, Pos),
) -> Parsed<()> {
    let mut wires: HashMap<&str, (usize, Wire)> = HashMap::new();
    for (order, s) in sources.iter().enumerate() {
        if wires.insert(&s.name, (order, Wire::Source)).is_some() {
            return Err(s.pos.error(format!("`{}` is defined twice", s.name)));
        }
    }
    for (k, d) in definitions.iter().enumerate() {
        if wires
            .insert(&d.name, (sources.len() + k, Wire::Gate(d)))
            .is_some()
        {
            return Err(d.pos.error(format!("`{}` is defined twice", d.name)));
        }
    }

    // Alphabet sizes, resolved in file order so every reference points backwards.
    let mut sizes: HashMap<&str, usize> = sources
        .iter()
        .map(|s| (s.name.as_str(), s.labels.len()))
        .collect();
    for (k, d) in definitions.iter().enumerate() {
        let mut arg_sizes = Vec::new();
        for a in &d.args {
            match wires.get(a.as_str()) {
                None => return Err(d.pos.error(format!("unknown name `{a}` in `{}`", d.name))),
                Some((order, _)) if *order >= sources.len() + k => {
                    let message = if reaches(a, &d.name, &wires) {
                        format!("cycle: `{}` depends on itself through `{a}`", d.name)
                    } else {
                        format!("forward reference to `{a}` in `{}`", d.name)
                    };
                    return Err(d.pos.error(message));
                }
                Some(_) => arg_sizes.push((a, sizes[a.as_str()])),
            }
        }
        if d.gate.is_logic() {
            if let Some((a, n)) = arg_sizes.iter().find(|(_, n)| *n != 2) {
                return Err(d.pos.error(format!(
                    "{} needs binary inputs, `{a}` has {n} states",
                    d.gate
                )));
            }
        }
        let size = match d.gate {
            Gate::Xor | Gate::And | Gate::Or | Gate::Not => 2,
            Gate::Copy => arg_sizes[0].1,
            Gate::Concat => arg_sizes.iter().map(|(_, n)| *n).product(),
        };
        sizes.insert(&d.name, size);
    }

    let mut seen = HashSet::new();
    for (name, pos) in predictors.iter().chain(std::iter::once(target)) {
        if !wires.contains_key(name.as_str()) {
            return Err(pos.error(format!("unknown name `{name}`")));
        }
        if !seen.insert(name.as_str()) {
            return Err(pos.error(format!("`{name}` appears more than once among predictors and target")));
        }
    }

    let mut used: HashSet<&str> = HashSet::new();
    let mut stack: Vec<&str> = seen.iter().copied().collect();
    while let Some(name) = stack.pop() {
        if used.insert(name) {
            if let Some((_, Wire::Gate(d))) = wires.get(name) {
                stack.extend(d.args.iter().map(String::as_str));
            }
        }
    }
    let unused = sources
        .iter()
        .map(|s| (&s.name, s.pos))
        .chain(definitions.iter().map(|d| (&d.name, d.pos)))
        .find(|(n, _)| !used.contains(n.as_str()));
    if let Some((name, pos)) = unused {
        return Err(pos.error(format!("`{name}` is never used by a predictor or the target")));
    }
    Ok(())
}

fn reaches(from: &str, to: &str, wires: &HashMap<&str, (usize, Wire)>) -> bool {
    let mut stack = vec![from];
    let mut seen = HashSet::new();
    while let Some(name) = stack.pop() {
        if name == to {
            return true;
        }
        if seen.insert(name) {
            if let Some((_, Wire::Gate(d))) = wires.get(name) {
                stack.extend(d.args.iter().map(String::as_str));
            }
        }
    }
    false
}

/// Wire values during evaluation: a state index into the wire's alphabet.
struct Alphabet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    fn new(labels: Vec<String>) -> Self {
        let mut out = Alphabet {
            labels: Vec::new(),
            index: HashMap::new(),
        };
        for l in labels {
            if !out.index.contains_key(&l) {
                out.index.insert(l.clone(), out.labels.len());
                out.labels.push(l);
            }
        }
        out
    }

    fn binary() -> Self {
        Alphabet::new(vec!["0".into(), "1".into()])
    }
}

/// Enumerates every joint source assignment and accumulates its probability
/// in the `(predictors…, target)` cell the gates produce.
pub fn compile_circuit(spec: &CircuitSpec) -> Result<JointTable> {
    let shape: Vec<usize> = spec.sources.iter().map(|s| s.labels.len()).collect();
    let assignments = shape
        .iter()
        .try_fold(1usize, |acc, &k| acc.checked_mul(k).filter(|&n| n <= MAX_ASSIGNMENTS));
    let Some(_) = assignments else {
        return Err(Error::InvalidArgument(format!(
            "circuit has more than {MAX_ASSIGNMENTS} joint source states"
        )));
    };

    let mut slot: HashMap<&str, usize> = HashMap::new();
    let mut alphabets: Vec<Alphabet> = Vec::new();
    for s in &spec.sources {
        slot.insert(&s.name, alphabets.len());
        alphabets.push(Alphabet::new(s.labels.clone()));
    }
    let mut programs = Vec::new();
    for d in &spec.definitions {
        let args: Vec<usize> = d
            .args
            .iter()
            .map(|a| {
                slot.get(a.as_str()).copied().ok_or_else(|| {
                    Error::from(d.pos.error(format!("unknown name `{a}` in `{}`", d.name)))
                })
            })
            .collect::<Result<_>>()?;
        if d.gate.is_logic() {
            if let Some(&a) = args.iter().find(|&&a| alphabets[a].labels.len() != 2) {
                return Err(d
                    .pos
                    .error(format!("{} needs binary inputs, `{}` is not binary", d.gate, spec_name(spec, a)))
                    .into());
            }
        }
        let alphabet = match d.gate {
            Gate::Copy => Alphabet::new(alphabets[args[0]].labels.clone()),
            Gate::Concat => {
                let dims: Vec<usize> = args.iter().map(|&a| alphabets[a].labels.len()).collect();
                let mut labels = Vec::new();
                for_each_index(&dims, |idx| {
                    labels.push(
                        idx.iter()
                            .zip(&args)
                            .map(|(&i, &a)| alphabets[a].labels[i].as_str())
                            .collect::<String>(),
                    );
                });
                Alphabet::new(labels)
            }
            _ => Alphabet::binary(),
        };
        slot.insert(&d.name, alphabets.len());
        alphabets.push(alphabet);
        programs.push((d.gate, args));
    }

    let outputs: Vec<usize> = spec
        .predictors
        .iter()
        .chain(std::iter::once(&spec.target))
        .map(|n| {
            slot.get(n.as_str())
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("unknown name `{n}`")))
        })
        .collect::<Result<_>>()?;
    let axes: Vec<VariableAxis> = spec
        .predictors
        .iter()
        .chain(std::iter::once(&spec.target))
        .zip(&outputs)
        .map(|(n, &w)| VariableAxis::new(n.as_str(), alphabets[w].labels.clone()))
        .collect::<Result<_>>()?;
    let dims: Vec<usize> = axes.iter().map(VariableAxis::len).collect();
    let mut mass = vec![0.0; dims.iter().product()];

    let n_sources = spec.sources.len();
    let mut values = vec![0usize; alphabets.len()];
    for_each_index(&shape, |idx| {
        values[..n_sources].copy_from_slice(idx);
        let p: f64 = spec
            .sources
            .iter()
            .zip(idx)
            .map(|(s, &i)| s.probabilities[i])
            .product();
        for (k, (gate, args)) in programs.iter().enumerate() {
            let out = n_sources + k;
            let bit = |a: &usize| values[*a] == 1;
            values[out] = match gate {
                Gate::Xor => args.iter().filter(|a| bit(a)).count() % 2,
                Gate::And => usize::from(args.iter().all(bit)),
                Gate::Or => usize::from(args.iter().any(bit)),
                Gate::Not => usize::from(!bit(&args[0])),
                Gate::Copy => values[args[0]],
                Gate::Concat => {
                    let label: String = args
                        .iter()
                        .map(|&a| alphabets[a].labels[values[a]].as_str())
                        .collect();
                    alphabets[out].index[&label]
                }
            };
        }
        let flat = outputs
            .iter()
            .zip(&dims)
            .fold(0, |acc, (&w, &d)| acc * d + values[w]);
        mass[flat] += p;
    });
    let target = axes.last().expect("target axis").clone();
    let mut predictors = axes;
    predictors.pop();
    JointTable::new(predictors, target, mass)
}

fn spec_name(spec: &CircuitSpec, slot: usize) -> &str {
    if slot < spec.sources.len() {
        &spec.sources[slot].name
    } else {
        &spec.definitions[slot - spec.sources.len()].name
    }
}

/// Parses and compiles in one step.
pub fn compile_text(text: &str) -> Result<JointTable> {
    compile_circuit(&parse_circuit(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_example, ExampleId};

    const XOR: &str = "source a uniform(2)\nsource b uniform(2)\nY := XOR(a,b)\npredictors: a b\ntarget: Y";

    fn located(text: &str) -> CircuitError {
        match parse_circuit(text) {
            Err(Error::Circuit(e)) => e,
            other => panic!("expected a located error, got {other:?}"),
        }
    }

    fn same_cells(a: &JointTable, b: &JointTable) -> bool {
        a.mass() == b.mass()
            && a.axes().len() == b.axes().len()
            && a.axes().iter().zip(b.axes()).all(|(x, y)| x.states() == y.states())
    }

    #[test]
    fn xor_text_matches_corpus_up_to_axis_names() {
        let t = compile_text(XOR).unwrap();
        assert_eq!(t.predictor_names(), ["a", "b"]);
        assert!(same_cells(&t, &build_example(ExampleId::Xor)));
    }

    #[test]
    fn bundled_circuits_round_trip() {
        for id in ExampleId::ALL {
            let t = compile_text(id.circuit_source()).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(t, build_example(id), "{id}");
        }
    }

    #[test]
    fn self_reference_is_a_cycle() {
        let e = located("source a uniform(2)\nY := XOR(a,Y)\npredictors: a\ntarget: Y");
        assert_eq!((e.line, e.col), (2, 1));
        assert!(e.message.contains("cycle"), "{e}");
    }

    #[test]
    fn longer_cycle_and_forward_reference() {
        let e = located(
            "source a uniform(2)\nP := XOR(a,Q)\nQ := XOR(a,P)\npredictors: a P\ntarget: Q",
        );
        assert!(e.message.contains("cycle"), "{e}");
        let e = located("source a uniform(2)\nP := NOT(Q)\nQ := NOT(a)\npredictors: P\ntarget: Q");
        assert!(e.message.contains("forward reference"), "{e}");
    }

    #[test]
    fn semantic_errors_name_the_rule() {
        let e = located("source a uniform(3)\nY := NOT(a)\npredictors: a\ntarget: Y");
        assert!(e.message.contains("binary"), "{e}");
        let e = located("source a dist(0.5, 0.4)\nY := NOT(a)\npredictors: a\ntarget: Y");
        assert!(e.message.contains("sums to"), "{e}");
        let e = located("source a uniform(2)\nY := NOT(b)\npredictors: a\ntarget: Y");
        assert!(e.message.contains("unknown name `b`"), "{e}");
        let e = located("source a uniform(2)\nY := FOO(a)\npredictors: a\ntarget: Y");
        assert_eq!((e.line, e.col), (2, 6));
    }

    #[test]
    fn error_display_is_line_col_message() {
        let e = located("source a uniform(2)\nY := NOT(a\npredictors: a\ntarget: Y");
        assert_eq!(e.to_string(), "2:11: expected `,` or `)`, found end of line");
    }

    #[test]
    fn dist_fractions_and_labels() {
        let t = compile_text(
            "source a dist(1/4, 3/4) labels(lo, hi)\nY := COPY(a)\nX := NOT(a)\npredictors: X\ntarget: Y",
        )
        .unwrap();
        assert_eq!(t.target().states(), ["lo", "hi"]);
        assert_eq!(t.mass(), [0.0, 0.75, 0.25, 0.0]);
    }

    #[test]
    fn concat_merges_colliding_labels() {
        let t = compile_text(
            "source a uniform(2) labels(x, xy)\nsource b uniform(2) labels(yz, z)\n\
             Y := CONCAT(a, b)\npredictors: a b\ntarget: Y",
        )
        .unwrap();
        assert_eq!(t.target().states(), ["xyz", "xz", "xyyz"]);
        let y = t.marginal(&["Y"]).unwrap();
        assert_eq!(y.mass(), [0.5, 0.25, 0.25]);
    }

    #[test]
    fn state_space_guard() {
        let mut text = String::new();
        for i in 0..21 {
            text.push_str(&format!("source s{i} uniform(2)\n"));
        }
        let args: Vec<String> = (0..21).map(|i| format!("s{i}")).collect();
        text.push_str(&format!("Y := XOR({})\npredictors: s0\ntarget: Y\n", args.join(",")));
        let spec = parse_circuit(&text).unwrap();
        assert!(compile_circuit(&spec).is_err());
    }

    #[test]
    fn every_single_token_deletion_is_rejected() {
        for id in ExampleId::ALL {
            let text = id.circuit_source();
            let toks = lex(text).unwrap();
            for (tok, pos) in toks.iter().filter(|t| t.0 != Tok::Newline) {
                let lines: Vec<String> = text.lines().map(str::to_string).collect();
                let start: usize = lines[pos.line - 1].chars().take(pos.col - 1).map(char::len_utf8).sum();
                let len = match tok {
                    Tok::Ident(s) | Tok::Number(s) => s.len(),
                    Tok::Assign => 2,
                    _ => 1,
                };
                for filler in [" ", ""] {
                    let mut lines = lines.clone();
                    lines[pos.line - 1].replace_range(start..start + len, filler);
                    let e = located(&lines.join("\n"));
                    assert!(e.line >= 1 && e.col >= 1, "{id}: deleting {tok} at {pos:?}");
                }
            }
        }
    }
}
