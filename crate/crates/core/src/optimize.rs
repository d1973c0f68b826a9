//! Minimization of a smooth objective over `{x : A x = b, x ≥ 0}`.
//!
//! The equality rows are orthonormalized once (rank-revealing modified
//! Gram–Schmidt, redundant rows dropped). Euclidean projection onto the
//! polytope solves the piecewise-linear dual `U max(0, z + Uᵀλ) = u` with a
//! damped semismooth Newton iteration, which lands exactly on the faces the
//! descent needs. Descent is projected gradient in the diagonal metric
//! `diag(x)`, with an Armijo backtracking search along the projection arc
//! started from a spectral step length.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Rows whose Gram–Schmidt remainder falls below this norm are redundant.
const RANK_TOLERANCE: f64 = 1e-10;
const MAX_PROJECTION_ROUNDS: usize = 200;
const ARMIJO_C1: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;
const MAX_STEP: f64 = 1e12;
/// Added to every coordinate of the diagonal metric so empty cells can refill.
const SCALE_FLOOR: f64 = 1e-10;
const STALL_WINDOW: usize = 10;

/// One linear equality `Σ coeff · x[index] = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// Linear equalities plus implicit nonnegativity of every coordinate.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    dimension: usize,
    rows: Vec<LinearConstraint>,
    /// Orthonormal basis of the row space, one dense row per entry.
    basis: Vec<Vec<f64>>,
    basis_rhs: Vec<f64>,
}

impl ConstraintSystem {
    pub fn new(dimension: usize, rows: Vec<LinearConstraint>) -> Result<Self> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut basis_rhs = Vec::new();
        for row in &rows {
            let mut v = vec![0.0; dimension];
            for &(i, c) in &row.terms {
                if i >= dimension {
                    return Err(Error::InvalidArgument(format!(
                        "constraint references coordinate {i} of a {dimension}-dimensional system"
                    )));
                }
                v[i] += c;
            }
            let scale = norm(&v);
            if scale == 0.0 {
                if row.rhs.abs() > RANK_TOLERANCE {
                    return Err(Error::InconsistentConstraints(row.rhs.abs()));
                }
                continue;
            }
            let mut r = row.rhs;
            // Two passes of Gram–Schmidt keep the basis orthogonal to working precision.
            for _ in 0..2 {
                for (q, &qr) in basis.iter().zip(&basis_rhs) {
                    let d = dot(q, &v);
                    axpy(-d, q, &mut v);
                    r -= d * qr;
                }
            }
            let remainder = norm(&v);
            if remainder <= RANK_TOLERANCE * scale {
                if r.abs() > 1e-8 * scale.max(1.0) {
                    return Err(Error::InconsistentConstraints(r.abs()));
                }
                continue;
            }
            v.iter_mut().for_each(|x| *x /= remainder);
            basis.push(v);
            basis_rhs.push(r / remainder);
        }
        Ok(Self {
            dimension,
            rows,
            basis,
            basis_rhs,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn rows(&self) -> &[LinearConstraint] {
        &self.rows
    }

    /// Number of independent equality rows kept after redundancy removal.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Largest absolute violation over the original equality rows.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|row| {
                let lhs: f64 = row.terms.iter().map(|&(i, c)| c * x[i]).sum();
                (lhs - row.rhs).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest violation of the equalities or of nonnegativity.
    pub fn infeasibility(&self, x: &[f64]) -> f64 {
        let neg = x.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
        self.residual(x).max(neg)
    }

    fn affine_gap(&self, x: &[f64]) -> Vec<f64> {
        self.basis
            .iter()
            .zip(&self.basis_rhs)
            .map(|(q, &r)| dot(q, x) - r)
            .collect()
    }

    /// Euclidean projection of `point` onto the feasible polytope.
    pub fn project_feasible(&self, point: &[f64], tolerance: f64) -> Result<Vec<f64>> {
        self.project_scaled(point, None, tolerance)
    }

    /// Projection in the metric `Σ (x_j − p_j)² / w_j`; `None` means unit weights.
    pub fn project_scaled(
        &self,
        point: &[f64],
        weights: Option<&[f64]>,
        tolerance: f64,
    ) -> Result<Vec<f64>> {
        if point.len() != self.dimension || weights.is_some_and(|w| w.len() != self.dimension) {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, system has {}",
                point.len(),
                self.dimension
            )));
        }
        let w = |j: usize| weights.map_or(1.0, |w| w[j]);
        let r = self.rank();
        if r == 0 {
            return Ok(point.iter().map(|&v| v.max(0.0)).collect());
        }
        // Unclipped affine projection gives the exact multipliers when no
        // coordinate would go negative (unit weights only).
        let mut lambda: Vec<f64> = match weights {
            None => self.affine_gap(point).iter().map(|g| -g).collect(),
            Some(_) => vec![0.0; r],
        };
        let mut x = self.primal(point, weights, &lambda);
        let mut gap = self.affine_gap(&x);
        for _ in 0..MAX_PROJECTION_ROUNDS {
            if self.residual(&x) <= tolerance {
                return Ok(x);
            }
            // Generalized Jacobian U W Uᵀ over the coordinates currently positive.
            let active: Vec<usize> = (0..self.dimension)
                .filter(|&j| point[j] + w(j) * self.lift(&lambda, j) > 0.0)
                .collect();
            let mut jac = DMatrix::<f64>::zeros(r, r);
            for a in 0..r {
                for b in a..r {
                    let s: f64 = active
                        .iter()
                        .map(|&j| w(j) * self.basis[a][j] * self.basis[b][j])
                        .sum();
                    jac[(a, b)] = s;
                    jac[(b, a)] = s;
                }
            }
            let gnorm = norm(&gap);
            let ridge = (1e-12_f64).max(1e-3 * gnorm.min(1.0) * gnorm.min(1.0));
            for a in 0..r {
                jac[(a, a)] += ridge;
            }
            let rhs = DVector::from_iterator(r, gap.iter().map(|g| -g));
            let step = match jac.clone().cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => rhs.clone(),
            };
            let direction: Vec<f64> = step.iter().copied().collect();
            let slope = dot(&gap, &direction);
            let merit = self.dual_merit(point, weights, &lambda);
            let mut t = 1.0;
            loop {
                let trial: Vec<f64> = lambda
                    .iter()
                    .zip(&direction)
                    .map(|(l, d)| l + t * d)
                    .collect();
                let decrease =
                    self.dual_merit(point, weights, &trial) <= merit + ARMIJO_C1 * t * slope;
                let closer = || {
                    norm(&self.affine_gap(&self.primal(point, weights, &trial)))
                        <= (1.0 - ARMIJO_C1 * t) * gnorm
                };
                if decrease || closer() || t < 1e-10 {
                    lambda = trial;
                    break;
                }
                t *= 0.5;
            }
            x = self.primal(point, weights, &lambda);
            gap = self.affine_gap(&x);
        }
        let residual = self.residual(&x);
        if residual <= tolerance {
            Ok(x)
        } else {
            Err(Error::ProjectionFailed {
                rounds: MAX_PROJECTION_ROUNDS,
                residual,
            })
        }
    }

    fn lift(&self, lambda: &[f64], j: usize) -> f64 {
        self.basis
            .iter()
            .zip(lambda)
            .map(|(q, l)| q[j] * l)
            .sum()
    }

    fn primal(&self, point: &[f64], weights: Option<&[f64]>, lambda: &[f64]) -> Vec<f64> {
        let mut shift = vec![0.0; self.dimension];
        for (q, &l) in self.basis.iter().zip(lambda) {
            axpy(l, q, &mut shift);
        }
        if let Some(w) = weights {
            shift.iter_mut().zip(w).for_each(|(s, w)| *s *= w);
        }
        point
            .iter()
            .zip(&shift)
            .map(|(p, s)| (p + s).max(0.0))
            .collect()
    }

    /// Convex dual whose gradient is `U x(λ) − u`.
    fn dual_merit(&self, point: &[f64], weights: Option<&[f64]>, lambda: &[f64]) -> f64 {
        let x = self.primal(point, weights, lambda);
        let quad: f64 = match weights {
            None => dot(&x, &x),
            Some(w) => x.iter().zip(w).map(|(v, w)| v * v / w).sum(),
        };
        0.5 * quad - dot(lambda, &self.basis_rhs)
    }
}

/// A differentiable objective on the nonnegative orthant.
pub trait Objective: Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance_bits: f64,
    pub feasibility_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iterations: 5000,
            tolerance_bits: 1e-10,
            feasibility_tolerance: 1e-10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if !(self.tolerance_bits > 0.0 && self.tolerance_bits <= 1e-6) {
            return Err(Error::InvalidConfig(format!(
                "tolerance_bits must lie in (0, 1e-6], got {}",
                self.tolerance_bits
            )));
        }
        if !(self.feasibility_tolerance > 0.0 && self.feasibility_tolerance < 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "feasibility_tolerance must lie in (0, 1e-3), got {}",
                self.feasibility_tolerance
            )));
        }
        Ok(())
    }
}

/// Objective values visited from one start, the first being the projected start.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub values: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    /// Index of the start that produced the minimum.
    pub start: usize,
    pub converged: bool,
    pub traces: Vec<Trace>,
}

/// Runs projected gradient descent from every start and keeps the lowest
/// objective, breaking ties by the lowest start index.
pub fn minimize<O: Objective>(
    objective: &O,
    system: &ConstraintSystem,
    starts: &[Vec<f64>],
    config: &OptimizerConfig,
) -> Result<Minimum> {
    config.validate()?;
    if starts.is_empty() {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let runs: Vec<Result<(Vec<f64>, f64, Trace)>> = starts
        .par_iter()
        .map(|s| descend(objective, system, s, config))
        .collect();
    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    let mut traces = Vec::with_capacity(runs.len());
    for (k, run) in runs.into_iter().enumerate() {
        let (point, value, trace) = run?;
        traces.push(trace);
        if best.as_ref().is_none_or(|(_, _, v)| value < *v) {
            best = Some((k, point, value));
        }
    }
    let (start, point, value) = best.expect("non-empty starts");
    Ok(Minimum {
        point,
        value,
        start,
        converged: traces[start].converged,
        traces,
    })
}

fn descend<O: Objective>(
    objective: &O,
    system: &ConstraintSystem,
    start: &[f64],
    config: &OptimizerConfig,
) -> Result<(Vec<f64>, f64, Trace)> {
    let tol = config.feasibility_tolerance;
    let mut x = if system.infeasibility(start) <= tol * 1e-2 {
        start.to_vec()
    } else {
        system.project_feasible(start, tol)?
    };
    let mut f = objective.value(&x);
    if !f.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    let mut values = vec![f];
    let mut grad = vec![0.0; x.len()];
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut quiet = 0;
    let mut converged = false;
    for _ in 0..config.max_iterations {
        objective.gradient(&x, &mut grad);
        // Spectral (Barzilai–Borwein) trial step from the last displacement.
        let scale: Vec<f64> = x.iter().map(|v| v.max(0.0) + SCALE_FLOOR).collect();
        let mut step = match &previous {
            Some((px, pg)) => {
                let s: Vec<f64> = x.iter().zip(px).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = grad.iter().zip(pg).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                let ss: f64 = s.iter().zip(&scale).map(|(s, w)| s * s / w).sum();
                if sy > 0.0 {
                    (ss / sy).clamp(MIN_STEP, MAX_STEP)
                } else {
                    1.0
                }
            }
            None => 1.0,
        };
        let mut accepted = None;
        while step >= MIN_STEP {
            let trial: Vec<f64> = x
                .iter()
                .zip(&grad)
                .zip(&scale)
                .map(|((a, g), w)| a - step * w * g)
                .collect();
            let candidate = match system.project_scaled(&trial, Some(&scale), tol) {
                Ok(c) => c,
                Err(Error::ProjectionFailed { .. }) => {
                    step *= 0.5;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let moved: f64 = candidate
                .iter()
                .zip(&x)
                .zip(&grad)
                .map(|((c, a), g)| g * (c - a))
                .sum();
            if moved >= 0.0 {
                // Projected direction is not a descent direction: stationary.
                break;
            }
            let fc = objective.value(&candidate);
            if !fc.is_finite() {
                return Err(Error::NonFiniteObjective);
            }
            if fc <= f + ARMIJO_C1 * moved {
                accepted = Some((candidate, fc));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, fc)) = accepted else {
            converged = true;
            break;
        };
        let delta = f - fc;
        previous = Some((std::mem::replace(&mut x, candidate), grad.clone()));
        f = fc;
        values.push(f);
        if delta.abs() < config.tolerance_bits {
            quiet += 1;
            if quiet >= STALL_WINDOW {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok((x, f, Trace { values, converged }))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
