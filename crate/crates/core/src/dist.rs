//! Finite discrete joint distributions and the Shannon quantities built on them.
//!
//! A [`Distribution`] is a dense mass array over the product of its axes, laid
//! out row-major (last axis varies fastest). A [`JointTable`] is a distribution
//! whose last axis is the target and whose remaining axes are the predictors.
//! Every public scalar is reported in bits.

use std::collections::HashSet;
use std::fmt;
use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};

/// Allowed deviation of the total mass from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Masses at or below this are exact zeros for support and continuity checks.
pub const ZERO_MASS: f64 = 1e-15;

/// An information quantity in bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Bits(f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);

    pub fn new(value: f64) -> Self {
        debug_assert!(value.is_finite(), "non-finite information value {value}");
        Bits(value)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Bits> for f64 {
    fn from(b: Bits) -> f64 {
        b.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A named discrete variable with an ordered alphabet of state labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct VariableAxis {
    name: String,
    states: Vec<String>,
}

impl VariableAxis {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        states: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let name = name.into();
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if name.is_empty() {
            return Err(Error::InvalidAxis("axis name is empty".into()));
        }
        if states.is_empty() {
            return Err(Error::InvalidAxis(format!("axis `{name}` has no states")));
        }
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(Error::InvalidAxis(format!(
                    "axis `{name}` repeats state `{s}`"
                )));
            }
        }
        Ok(Self { name, states })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// Dense probability mass over the product of a list of axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    axes: Vec<VariableAxis>,
    mass: Vec<f64>,
}

impl Distribution {
    pub fn new(axes: Vec<VariableAxis>, mass: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidArgument(
                "a distribution needs at least one axis".into(),
            ));
        }
        let mut names = HashSet::new();
        for a in &axes {
            if !names.insert(a.name()) {
                return Err(Error::InvalidAxis(format!(
                    "axis name `{}` is used twice",
                    a.name()
                )));
            }
        }
        let expected: usize = axes.iter().map(VariableAxis::len).product();
        if expected != mass.len() {
            return Err(Error::ShapeMismatch {
                expected,
                found: mass.len(),
            });
        }
        for (index, &value) in mass.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidMass { index, value });
            }
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Unnormalized(total));
        }
        Ok(Self { axes, mass })
    }

    /// Builds a distribution by evaluating `f` at every multi-index.
    pub fn from_fn(axes: Vec<VariableAxis>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let shape: Vec<usize> = axes.iter().map(VariableAxis::len).collect();
        let mut mass = Vec::with_capacity(shape.iter().product());
        for_each_index(&shape, |idx| mass.push(f(idx)));
        Self::new(axes, mass)
    }

    pub fn axes(&self) -> &[VariableAxis] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(VariableAxis::len).collect()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name() == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    fn axis_indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for name in names {
            let i = self.axis_index(name)?;
            if out.contains(&i) {
                return Err(Error::InvalidArgument(format!(
                    "axis `{name}` listed twice"
                )));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// Mass at a multi-index (one state index per axis).
    pub fn prob(&self, index: &[usize]) -> f64 {
        self.mass[flat_index(&self.shape(), index)]
    }

    /// Iterates `(multi-index, mass)` over every cell, including zeros.
    pub fn cells(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let shape = self.shape();
        self.mass
            .iter()
            .enumerate()
            .map(move |(i, &p)| (unflatten(&shape, i), p))
    }

    /// Sums mass onto the axes at `keep`, in the order given.
    pub(crate) fn project(&self, keep: &[usize]) -> Vec<f64> {
        let shape = self.shape();
        let strides = strides(&shape);
        let out_shape: Vec<usize> = keep.iter().map(|&k| shape[k]).collect();
        let out_strides = strides_of(&out_shape);
        let mut out = vec![0.0; out_shape.iter().product()];
        for (i, &p) in self.mass.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut j = 0;
            for (slot, &k) in keep.iter().enumerate() {
                j += ((i / strides[k]) % shape[k]) * out_strides[slot];
            }
            out[j] += p;
        }
        out
    }

    /// Marginal over the named axes. Axis order follows this distribution.
    pub fn marginal(&self, keep: &[&str]) -> Result<Distribution> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument(
                "marginal needs at least one axis".into(),
            ));
        }
        let mut idx = self.axis_indices(keep)?;
        idx.sort_unstable();
        let axes = idx.iter().map(|&i| self.axes[i].clone()).collect();
        Ok(Distribution {
            axes,
            mass: self.project(&idx),
        })
    }

    /// Distribution of the remaining axes given `axis = state`.
    pub fn conditional(&self, axis: &str, state: &str) -> Result<Distribution> {
        let a = self.axis_index(axis)?;
        let s = self.axes[a]
            .state_index(state)
            .ok_or_else(|| Error::UnknownState {
                axis: axis.to_string(),
                state: state.to_string(),
            })?;
        if self.axes.len() < 2 {
            return Err(Error::InvalidArgument(
                "cannot condition a single-axis distribution".into(),
            ));
        }
        let shape = self.shape();
        let rest: Vec<usize> = (0..self.axes.len()).filter(|&i| i != a).collect();
        let rest_shape: Vec<usize> = rest.iter().map(|&i| shape[i]).collect();
        let mut mass = Vec::with_capacity(rest_shape.iter().product());
        let mut full = vec![0; shape.len()];
        for_each_index(&rest_shape, |ri| {
            for (slot, &axis_i) in rest.iter().enumerate() {
                full[axis_i] = ri[slot];
            }
            full[a] = s;
            mass.push(self.mass[flat_index(&shape, &full)]);
        });
        let total: f64 = mass.iter().sum();
        if total <= ZERO_MASS {
            return Err(Error::ZeroProbability {
                axis: axis.to_string(),
                state: state.to_string(),
            });
        }
        for m in &mut mass {
            *m /= total;
        }
        Ok(Distribution {
            axes: rest.iter().map(|&i| self.axes[i].clone()).collect(),
            mass,
        })
    }

    /// Joint entropy of the named axes.
    pub fn entropy(&self, axes: &[&str]) -> Result<Bits> {
        let idx = self.axis_indices(axes)?;
        Ok(Bits::new(entropy_of(&self.project(&idx))))
    }

    pub(crate) fn entropy_idx(&self, idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 0.0;
        }
        entropy_of(&self.project(idx))
    }

    /// `I(A : B)` for disjoint, non-empty axis sets.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<Bits> {
        self.conditional_mutual_information(a, b, &[])
    }

    /// `I(A : B | C)` computed from joint entropies.
    pub fn conditional_mutual_information(
        &self,
        a: &[&str],
        b: &[&str],
        given: &[&str],
    ) -> Result<Bits> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidArgument(
                "mutual information needs two non-empty axis sets".into(),
            ));
        }
        let ai = self.axis_indices(a)?;
        let bi = self.axis_indices(b)?;
        let ci = self.axis_indices(given)?;
        for (x, name) in ai.iter().zip(a) {
            if bi.contains(x) || ci.contains(x) {
                return Err(Error::OverlappingAxes((*name).to_string()));
            }
        }
        for (x, name) in bi.iter().zip(b) {
            if ci.contains(x) {
                return Err(Error::OverlappingAxes((*name).to_string()));
            }
        }
        let ac: Vec<usize> = ai.iter().chain(&ci).copied().collect();
        let bc: Vec<usize> = bi.iter().chain(&ci).copied().collect();
        let abc: Vec<usize> = ai.iter().chain(&bi).chain(&ci).copied().collect();
        Ok(Bits::new(
            self.entropy_idx(&ac) + self.entropy_idx(&bc)
                - self.entropy_idx(&abc)
                - self.entropy_idx(&ci),
        ))
    }

    /// `Σ H(X_i) − H(X_1…X_k)`, optionally with every term conditioned on one axis.
    pub fn total_correlation(&self, axes: &[&str], given: Option<&str>) -> Result<Bits> {
        if axes.len() < 2 {
            return Err(Error::InvalidArgument(
                "total correlation needs at least two axes".into(),
            ));
        }
        let idx = self.axis_indices(axes)?;
        let cond = match given {
            Some(name) => {
                let c = self.axis_index(name)?;
                if idx.contains(&c) {
                    return Err(Error::OverlappingAxes(name.to_string()));
                }
                vec![c]
            }
            None => Vec::new(),
        };
        let h_cond = self.entropy_idx(&cond);
        let mut sum = 0.0;
        for &i in &idx {
            let mut s = vec![i];
            s.extend(&cond);
            sum += self.entropy_idx(&s) - h_cond;
        }
        let mut all = idx.clone();
        all.extend(&cond);
        Ok(Bits::new(sum - (self.entropy_idx(&all) - h_cond)))
    }

    /// Element-wise closeness, including identical axes.
    pub fn approx_eq(&self, other: &Distribution, tol: f64) -> bool {
        self.axes == other.axes
            && self
                .mass
                .iter()
                .zip(&other.mass)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    fn describe_cell(&self, flat: usize) -> String {
        let idx = unflatten(&self.shape(), flat);
        self.axes
            .iter()
            .zip(idx)
            .map(|(a, s)| format!("{}={}", a.name(), a.states()[s]))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// `D_KL(p ‖ q)` in bits. Both must share identical axes.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<Bits> {
    if p.axes != q.axes {
        return Err(Error::InvalidArgument(
            "KL divergence needs identical axis structure".into(),
        ));
    }
    let mut total = 0.0;
    for (i, (&a, &b)) in p.mass.iter().zip(&q.mass).enumerate() {
        if a <= ZERO_MASS {
            continue;
        }
        if b <= ZERO_MASS {
            return Err(Error::NotAbsolutelyContinuous(p.describe_cell(i)));
        }
        total += a * (a / b).log2();
    }
    Ok(Bits::new(total))
}

/// A distribution whose last axis is the target and whose other axes are predictors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointTable {
    #[serde(flatten)]
    dist: Distribution,
}

impl JointTable {
    pub fn new(predictors: Vec<VariableAxis>, target: VariableAxis, mass: Vec<f64>) -> Result<Self> {
        if predictors.is_empty() {
            return Err(Error::InvalidArgument(
                "a joint table needs at least one predictor".into(),
            ));
        }
        let mut axes = predictors;
        axes.push(target);
        Ok(Self {
            dist: Distribution::new(axes, mass)?,
        })
    }

    /// Reinterprets a distribution with two or more axes; the last one is the target.
    pub fn from_distribution(dist: Distribution) -> Result<Self> {
        if dist.axes.len() < 2 {
            return Err(Error::InvalidArgument(
                "a joint table needs at least one predictor".into(),
            ));
        }
        Ok(Self { dist })
    }

    pub fn from_fn(
        predictors: Vec<VariableAxis>,
        target: VariableAxis,
        f: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self> {
        let mut axes = predictors;
        axes.push(target);
        Self::from_distribution(Distribution::from_fn(axes, f)?)
    }

    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }

    pub fn n_predictors(&self) -> usize {
        self.dist.axes.len() - 1
    }

    pub fn predictors(&self) -> &[VariableAxis] {
        &self.dist.axes[..self.n_predictors()]
    }

    pub fn target(&self) -> &VariableAxis {
        &self.dist.axes[self.n_predictors()]
    }

    pub fn predictor_names(&self) -> Vec<&str> {
        self.predictors().iter().map(VariableAxis::name).collect()
    }

    pub fn target_name(&self) -> &str {
        self.target().name()
    }

    /// Marginal mass of the target.
    pub fn target_marginal(&self) -> Vec<f64> {
        self.dist.project(&[self.n_predictors()])
    }

    /// Joint mass over `(X_i, Y)` as a `|X_i| × |Y|` row-major vector.
    pub fn pair_marginal(&self, predictor: usize) -> Vec<f64> {
        self.dist.project(&[predictor, self.n_predictors()])
    }

    /// `I(X_1…X_n : Y)`.
    pub fn whole_information(&self) -> Bits {
        let n = self.n_predictors();
        let preds: Vec<usize> = (0..n).collect();
        let h_x = self.dist.entropy_idx(&preds);
        let h_y = self.dist.entropy_idx(&[n]);
        let all: Vec<usize> = (0..=n).collect();
        Bits::new(h_x + h_y - self.dist.entropy_idx(&all))
    }

    /// `I(X_i : Y)` for the predictor at position `i`.
    pub fn singleton_information(&self, i: usize) -> Bits {
        let n = self.n_predictors();
        Bits::new(
            self.dist.entropy_idx(&[i]) + self.dist.entropy_idx(&[n])
                - self.dist.entropy_idx(&[i, n]),
        )
    }

    /// `D_KL(Pr(X_i | y) ‖ Pr(X_i))`, the information state `y` gains from `X_i`.
    pub fn specific_surprise(&self, predictor: &str, y_state: &str) -> Result<Bits> {
        let i = self.dist.axis_index(predictor)?;
        let n = self.n_predictors();
        if i == n {
            return Err(Error::InvalidArgument(format!(
                "`{predictor}` is the target, not a predictor"
            )));
        }
        let y = self
            .target()
            .state_index(y_state)
            .ok_or_else(|| Error::UnknownState {
                axis: self.target_name().to_string(),
                state: y_state.to_string(),
            })?;
        self.specific_surprise_idx(i, y)
            .ok_or_else(|| Error::ZeroProbability {
                axis: self.target_name().to_string(),
                state: y_state.to_string(),
            })
    }

    /// Index-based specific surprise; `None` when `Pr(y) = 0`.
    pub(crate) fn specific_surprise_idx(&self, i: usize, y: usize) -> Option<Bits> {
        let ny = self.target().len();
        let joint = self.pair_marginal(i);
        let py: f64 = (0..self.dist.axes[i].len()).map(|x| joint[x * ny + y]).sum();
        if py <= ZERO_MASS {
            return None;
        }
        let mut total = 0.0;
        for x in 0..self.dist.axes[i].len() {
            let pxy = joint[x * ny + y];
            if pxy <= 0.0 {
                continue;
            }
            let px: f64 = (0..ny).map(|yy| joint[x * ny + yy]).sum();
            total += (pxy / py) * (pxy / (px * py)).log2();
        }
        Some(Bits::new(total))
    }

    /// A new table over the named predictors with a target formed by the joint
    /// of `target` axes. Composite target labels join component labels with `,`.
    pub fn select(&self, predictors: &[&str], target: &[&str]) -> Result<JointTable> {
        if predictors.is_empty() || target.is_empty() {
            return Err(Error::InvalidArgument(
                "select needs at least one predictor and one target axis".into(),
            ));
        }
        let pi = self.dist.axis_indices(predictors)?;
        let ti = self.dist.axis_indices(target)?;
        if let Some(name) = predictors.iter().find(|p| target.contains(p)) {
            return Err(Error::OverlappingAxes((*name).to_string()));
        }
        let mut keep = pi.clone();
        keep.extend(&ti);
        let mass = self.dist.project(&keep);
        let mut axes: Vec<VariableAxis> = pi.iter().map(|&i| self.dist.axes[i].clone()).collect();
        let target_axis = if ti.len() == 1 {
            self.dist.axes[ti[0]].clone()
        } else {
            let shape: Vec<usize> = ti.iter().map(|&i| self.dist.axes[i].len()).collect();
            let mut labels = Vec::new();
            for_each_index(&shape, |idx| {
                labels.push(
                    idx.iter()
                        .zip(&ti)
                        .map(|(&s, &a)| self.dist.axes[a].states()[s].as_str())
                        .collect::<Vec<_>>()
                        .join(","),
                );
            });
            VariableAxis::new(target.join(","), labels)?
        };
        axes.push(target_axis);
        Ok(JointTable {
            dist: Distribution { axes, mass },
        })
    }
}

impl Deref for JointTable {
    type Target = Distribution;

    fn deref(&self) -> &Distribution {
        &self.dist
    }
}

pub(crate) fn entropy_of(mass: &[f64]) -> f64 {
    mass.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

fn strides_of(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    strides_of(shape)
}

pub(crate) fn flat_index(shape: &[usize], index: &[usize]) -> usize {
    index
        .iter()
        .zip(shape)
        .fold(0, |acc, (&i, &n)| acc * n + i)
}

pub(crate) fn unflatten(shape: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for k in (0..shape.len()).rev() {
        idx[k] = flat % shape[k];
        flat /= shape[k];
    }
    idx
}

/// Calls `f` for every multi-index of `shape` in row-major order.
pub(crate) fn for_each_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    if shape.iter().any(|&n| n == 0) {
        return;
    }
    let mut idx = vec![0; shape.len()];
    loop {
        f(&idx);
        let mut k = shape.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}
