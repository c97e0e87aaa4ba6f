//! Brute-force reference implementations for the test and acceptance
//! suites.
//!
//! Everything here is a plain exhaustive scan with no refinement step, so
//! agreement with the production algorithms is meaningful. The main solvers
//! never call into this module.

use crate::domain::{try_scan_grid, Interval};
use crate::expr::{self, EvalError, ExprAst};
use crate::scalarize::{ScalarizationProblem, WeightVector};
use thiserror::Error;

/// Configuration shared by the grid oracles.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Grid points per dimension, at least 2.
    pub grid_points: usize,
    pub seed: u64,
    /// Central-difference step.
    pub fd_step: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { grid_points: 1001, seed: 0, fd_step: 1e-5 }
    }
}

impl OracleConfig {
    fn validate(&self) -> Result<(), OracleError> {
        if self.grid_points < 2 {
            return Err(OracleError::InvalidConfig(
                "grid_points must be at least 2".into(),
            ));
        }
        if !(self.fd_step > 0.0) {
            return Err(OracleError::InvalidConfig("fd_step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle supports at most 3 dimensions, got {0}")]
    DimensionTooLarge(usize),
    #[error("invalid oracle config: {0}")]
    InvalidConfig(String),
    #[error("saddle oracle needs 2 or 3 objectives, got {0}")]
    SaddleObjectives(usize),
    #[error("saddle oracle supports at most 2 resource dimensions, got {0}")]
    SaddleDimension(usize),
    #[error("evaluating at {at:?}: {source}")]
    Eval { at: Vec<f64>, source: EvalError },
}

/// Exhaustive regular-grid minimization; ties resolve to the
/// lexicographically smallest grid point.
pub fn brute_force_min(
    f: &ExprAst,
    vars: &[String],
    domain: &[Interval],
    config: &OracleConfig,
) -> Result<(Vec<f64>, f64), OracleError> {
    config.validate()?;
    if domain.len() > 3 {
        return Err(OracleError::DimensionTooLarge(domain.len()));
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    try_scan_grid(domain, config.grid_points, |point| {
        let value = expr::evaluate_at(f, vars, point)
            .map_err(|source| OracleError::Eval { at: point.to_vec(), source })?;
        if best.as_ref().map(|(_, bv)| value < *bv).unwrap_or(true) {
            best = Some((point.to_vec(), value));
        }
        Ok(())
    })?;
    Ok(best.expect("grid scan visits at least one point"))
}

/// Result of [`brute_force_saddle`].
#[derive(Debug, Clone)]
pub struct SaddlePoint {
    pub beta: WeightVector,
    pub r_star: Vec<f64>,
    pub value: f64,
}

/// Dense double grid `max` over the weight simplex of `min` over the
/// resource box, evaluating the weighted sum directly from the objective
/// expressions. Ties resolve to the lexicographically smallest weight and
/// resource point.
pub fn brute_force_saddle(
    problem: &ScalarizationProblem,
    config: &OracleConfig,
) -> Result<SaddlePoint, OracleError> {
    config.validate()?;
    let n = problem.objectives().len();
    if !(2..=3).contains(&n) {
        return Err(OracleError::SaddleObjectives(n));
    }
    if problem.variables().len() > 2 {
        return Err(OracleError::SaddleDimension(problem.variables().len()));
    }

    let divisions = config.grid_points - 1;
    let mut best: Option<SaddlePoint> = None;
    for beta in WeightVector::lattice(n - 1, divisions) {
        let weights = beta.full();
        let mut inner: Option<(Vec<f64>, f64)> = None;
        try_scan_grid(problem.domain(), config.grid_points, |r| {
            let mut total = 0.0;
            for (obj, w) in problem.objectives().iter().zip(&weights) {
                total += w * expr::evaluate_at(obj, problem.variables(), r)
                    .map_err(|source| OracleError::Eval { at: r.to_vec(), source })?;
            }
            if inner.as_ref().map(|(_, bv)| total < *bv).unwrap_or(true) {
                inner = Some((r.to_vec(), total));
            }
            Ok(())
        })?;
        let (r_star, value) = inner.expect("resource grid is never empty");
        if best.as_ref().map(|b| value > b.value).unwrap_or(true) {
            best = Some(SaddlePoint { beta, r_star, value });
        }
    }
    Ok(best.expect("weight lattice is never empty"))
}

/// Central-difference gradient `(f(p + h e_i) - f(p - h e_i)) / (2h)`.
pub fn finite_difference_gradient(
    f: &ExprAst,
    vars: &[String],
    point: &[f64],
    h: f64,
) -> Result<Vec<f64>, EvalError> {
    assert!(h > 0.0, "finite-difference step must be positive");
    assert_eq!(vars.len(), point.len());
    let mut out = Vec::with_capacity(point.len());
    let mut shifted = point.to_vec();
    for i in 0..point.len() {
        shifted[i] = point[i] + h;
        let up = expr::evaluate_at(f, vars, &shifted)?;
        shifted[i] = point[i] - h;
        let down = expr::evaluate_at(f, vars, &shifted)?;
        shifted[i] = point[i];
        out.push((up - down) / (2.0 * h));
    }
    Ok(out)
}

/// Exhaustive feasibility scan: is there a lattice multiplier
/// `mu in [0, mu_max]^k` (step `step`) with
/// `||grad_o - sum mu_j * signed_grads[j]|| <= 1e-4 * (1 + ||grad_o||)`?
pub fn mu_grid_feasibility(
    grad_o: &[f64],
    signed_grads: &[Vec<f64>],
    mu_max: f64,
    step: f64,
) -> bool {
    let k = signed_grads.len();
    assert!((1..=3).contains(&k), "mu grid scan supports 1 to 3 constraints");
    assert!(mu_max > 0.0 && step > 0.0);
    for g in signed_grads {
        assert_eq!(g.len(), grad_o.len());
    }
    let tol = 1e-4 * (1.0 + grad_o.iter().map(|v| v * v).sum::<f64>().sqrt());
    let steps = (mu_max / step + 1e-9).floor() as usize;

    let mut index = vec![0usize; k];
    let mut mu = vec![0.0f64; k];
    loop {
        let mut residual_sq = 0.0;
        for (d, &g) in grad_o.iter().enumerate() {
            let mut r = g;
            for (j, grad) in signed_grads.iter().enumerate() {
                r -= mu[j] * grad[d];
            }
            residual_sq += r * r;
        }
        if residual_sq.sqrt() <= tol {
            return true;
        }
        // Odometer over the lattice.
        let mut j = k;
        loop {
            if j == 0 {
                return false;
            }
            j -= 1;
            index[j] += 1;
            if index[j] <= steps {
                mu[j] = index[j] as f64 * step;
                break;
            }
            index[j] = 0;
            mu[j] = 0.0;
            if j == 0 {
                return false;
            }
        }
    }
}
