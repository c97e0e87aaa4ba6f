//! Planar plot data for the cone interpretation of a 2-variable problem.
//!
//! The dataset is CSV-ready: `grid * grid` level-set samples in row-major
//! order, then one gradient arrow per objective and per constraint. Each
//! level row carries the boundary residual of the constraint whose boundary
//! passes nearest the sample point, so filtering rows with small `dx1`
//! traces the constraint curves of the figure.

use super::{
    analyze, constraint_gradient, objective_gradient, stationarity_sign, ConeVerdict, KktError,
    Problem,
};
use crate::expr;

/// Row kind in the plot dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Grid sample of the nearest constraint boundary residual.
    Level,
    /// Gradient arrow anchored at the query point.
    Arrow,
}

impl RowKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowKind::Level => "level",
            RowKind::Arrow => "arrow",
        }
    }
}

/// One CSV record: `kind,x1,x2,dx1,dx2,label`.
#[derive(Debug, Clone)]
pub struct PlotRow {
    pub kind: RowKind,
    pub x1: f64,
    pub x2: f64,
    pub dx1: f64,
    pub dx2: f64,
    pub label: String,
}

/// Sampled constraint curves plus gradient arrows and cone verdicts.
#[derive(Debug, Clone)]
pub struct PlotDataset {
    pub rows: Vec<PlotRow>,
    /// Cone verdict per objective, in objective order; also encoded in the
    /// objective arrow labels.
    pub verdicts: Vec<ConeVerdict>,
}

/// Samples the constraint boundaries over the domain box on a
/// `grid * grid` lattice and records gradient arrows at `point`.
///
/// Arrow rows use the case-signed constraint gradients, so the objective
/// arrow lies inside the drawn cone exactly when the verdict is `inside`.
pub fn emit_cone_plot_data(
    problem: &Problem,
    point: &[f64],
    grid: usize,
    tol: f64,
) -> Result<PlotDataset, KktError> {
    if problem.variables().len() != 2 {
        return Err(KktError::PlotDimension(problem.variables().len()));
    }
    if grid == 0 {
        return Err(KktError::InvalidGrid);
    }
    let analysis = analyze(problem, point, tol)?;

    let mut rows = Vec::with_capacity(
        grid * grid + problem.objectives().len() + problem.constraints().len(),
    );
    let vars = problem.variables();
    let box_ = problem.domain();
    for i in 0..grid {
        let x1 = box_[0].lattice_point(i, grid);
        for j in 0..grid {
            let x2 = box_[1].lattice_point(j, grid);
            let sample = [x1, x2];
            let mut nearest: Option<(usize, f64)> = None;
            for (y, c) in problem.constraints().iter().enumerate() {
                let value = expr::evaluate_at(&c.body, vars, &sample).map_err(|source| {
                    KktError::Eval { context: format!("constraint C{}", y + 1), source }
                })?;
                let residual = c.boundary_residual(value);
                if nearest
                    .map(|(_, best)| residual.abs() < best.abs())
                    .unwrap_or(true)
                {
                    nearest = Some((y, residual));
                }
            }
            let (y, residual) = nearest.expect("problems always have a constraint");
            rows.push(PlotRow {
                kind: RowKind::Level,
                x1,
                x2,
                dx1: residual,
                dx2: 0.0,
                label: format!("C{}", y + 1),
            });
        }
    }

    let mut verdicts = Vec::with_capacity(problem.objectives().len());
    for (x, report) in analysis.objectives.iter().enumerate() {
        let grad = objective_gradient(problem, x, point)?;
        verdicts.push(report.cone.verdict);
        rows.push(PlotRow {
            kind: RowKind::Arrow,
            x1: point[0],
            x2: point[1],
            dx1: grad[0],
            dx2: grad[1],
            label: format!("O{}:{}", x + 1, report.cone.verdict),
        });
    }
    for (y, c) in problem.constraints().iter().enumerate() {
        let grad = constraint_gradient(problem, y, point)?;
        let sign = stationarity_sign(problem.sense(), &c.relation);
        rows.push(PlotRow {
            kind: RowKind::Arrow,
            x1: point[0],
            x2: point[1],
            dx1: sign * grad[0],
            dx2: sign * grad[1],
            label: format!("C{}", y + 1),
        });
    }

    Ok(PlotDataset { rows, verdicts })
}
