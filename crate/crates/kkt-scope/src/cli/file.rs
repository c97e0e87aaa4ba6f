//! Problem-file ingestion.
//!
//! Problem files are flat TOML with `version = 1`. Two kinds exist:
//!
//! ```toml
//! version = 1
//! kind = "kkt"
//! sense = "maximize"
//! objectives = ["z"]
//! point = [5.0]            # optional query point
//!
//! [[variables]]
//! name = "z"
//! min = -5.0
//! max = 5.0
//!
//! [[constraints]]
//! expr = "z"
//! direction = "<=W"
//! bound = 5.0
//! ```
//!
//! and `kind = "scalarize"` with two or more objectives, no `sense`, and no
//! constraints. Optional keys `seed`, `tol`, `grid`, `beta_grid`,
//! `inner_grid`, `trials`, and `positivity` tune the commands; flags
//! override them.

use super::CliError;
use crate::domain::Interval;
use crate::expr::{is_valid_identifier, parse_expression, ExprAst};
use crate::kkt::{Constraint, Problem, Sense};
use crate::scalarize::ScalarizationProblem;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblemFile {
    version: Option<i64>,
    kind: Option<String>,
    sense: Option<String>,
    variables: Option<Vec<RawVariable>>,
    objectives: Option<Vec<String>>,
    constraints: Option<Vec<RawConstraint>>,
    point: Option<Vec<f64>>,
    seed: Option<u64>,
    tol: Option<f64>,
    grid: Option<usize>,
    beta_grid: Option<usize>,
    inner_grid: Option<usize>,
    trials: Option<usize>,
    positivity: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariable {
    name: String,
    min: f64,
    max: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    expr: String,
    direction: String,
    bound: Option<f64>,
}

/// Optional knobs carried by the file; flags take precedence.
#[derive(Debug, Clone, Default)]
pub struct FileOptions {
    pub point: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub beta_grid: Option<usize>,
    pub inner_grid: Option<usize>,
    pub trials: Option<usize>,
}

/// A validated problem of either kind.
#[derive(Debug)]
pub enum LoadedKind {
    Kkt(Problem),
    Scalarize(ScalarizationProblem),
}

#[derive(Debug)]
pub struct LoadedProblem {
    pub kind: LoadedKind,
    pub options: FileOptions,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Schema { path: path.into(), message: message.into() }
}

fn parse_expr_field(text: &str, path: &str) -> Result<ExprAst, CliError> {
    parse_expression(text).map_err(|e| CliError::Expression {
        path: path.to_string(),
        offset: e.offset(),
        message: e.to_string(),
    })
}

fn check_references(
    expr: &ExprAst,
    names: &[String],
    path: &str,
) -> Result<(), CliError> {
    for v in expr.variables() {
        if !names.iter().any(|n| *n == v) {
            return Err(schema(path, format!("references undeclared variable `{v}`")));
        }
    }
    Ok(())
}

/// Reads, parses, and validates a problem file. Every invariant is checked
/// eagerly; errors carry the offending field path.
pub fn load_problem(path: &Path) -> Result<LoadedProblem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        message: source.to_string(),
    })?;
    let raw: RawProblemFile = toml::from_str(&text)
        .map_err(|e| schema("", e.message().to_string()))?;

    match raw.version {
        Some(1) => {}
        Some(other) => return Err(schema("version", format!("unsupported version {other}, expected 1"))),
        None => return Err(schema("version", "missing; expected version = 1")),
    }

    let kind = raw
        .kind
        .as_deref()
        .ok_or_else(|| schema("kind", "missing; expected \"kkt\" or \"scalarize\""))?;

    let raw_variables = raw
        .variables
        .ok_or_else(|| schema("variables", "at least one variable is required"))?;
    if raw_variables.is_empty() {
        return Err(schema("variables", "at least one variable is required"));
    }
    let mut variables: Vec<(String, Interval)> = Vec::with_capacity(raw_variables.len());
    for (i, v) in raw_variables.iter().enumerate() {
        if !is_valid_identifier(&v.name) {
            return Err(schema(
                format!("variables[{i}].name"),
                format!("`{}` is not a valid identifier", v.name),
            ));
        }
        if variables.iter().any(|(n, _)| *n == v.name) {
            return Err(schema(
                format!("variables[{i}].name"),
                format!("variable `{}` is declared twice", v.name),
            ));
        }
        let interval = Interval::new(v.min, v.max);
        if !interval.is_valid() {
            return Err(schema(
                format!("variables[{i}]"),
                format!("domain [{}, {}] is not a finite non-empty interval", v.min, v.max),
            ));
        }
        variables.push((v.name.clone(), interval));
    }
    let names: Vec<String> = variables.iter().map(|(n, _)| n.clone()).collect();

    let raw_objectives = raw
        .objectives
        .ok_or_else(|| schema("objectives", "at least one objective is required"))?;
    if raw_objectives.is_empty() {
        return Err(schema("objectives", "at least one objective is required"));
    }
    let mut objectives = Vec::with_capacity(raw_objectives.len());
    for (i, text) in raw_objectives.iter().enumerate() {
        let path = format!("objectives[{i}]");
        let ast = parse_expr_field(text, &path)?;
        check_references(&ast, &names, &path)?;
        objectives.push(ast);
    }

    if let Some(point) = &raw.point {
        if point.len() != names.len() {
            return Err(schema(
                "point",
                format!("expected {} coordinates, got {}", names.len(), point.len()),
            ));
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Err(schema("point", "coordinates must be finite"));
        }
    }

    let options = FileOptions {
        point: raw.point,
        seed: raw.seed,
        tol: raw.tol,
        grid: raw.grid,
        beta_grid: raw.beta_grid,
        inner_grid: raw.inner_grid,
        trials: raw.trials,
    };

    let kind = match kind {
        "kkt" => {
            let sense = match raw.sense.as_deref() {
                Some("maximize") => Sense::Maximize,
                Some("minimize") => Sense::Minimize,
                Some(other) => {
                    return Err(schema(
                        "sense",
                        format!("`{other}` is not a sense; expected \"maximize\" or \"minimize\""),
                    ))
                }
                None => return Err(schema("sense", "required for kkt problems")),
            };
            let raw_constraints = raw
                .constraints
                .ok_or_else(|| schema("constraints", "at least one constraint is required"))?;
            if raw_constraints.is_empty() {
                return Err(schema("constraints", "at least one constraint is required"));
            }
            let mut constraints = Vec::with_capacity(raw_constraints.len());
            for (i, c) in raw_constraints.iter().enumerate() {
                let expr_path = format!("constraints[{i}].expr");
                let body = parse_expr_field(&c.expr, &expr_path)?;
                check_references(&body, &names, &expr_path)?;
                let constraint = match c.direction.as_str() {
                    ">=0" => {
                        if c.bound.is_some() {
                            return Err(schema(
                                format!("constraints[{i}].bound"),
                                "not allowed for direction \">=0\"",
                            ));
                        }
                        Constraint::geq_zero(body)
                    }
                    "<=W" => {
                        let bound = c.bound.ok_or_else(|| {
                            schema(
                                format!("constraints[{i}].bound"),
                                "required for direction \"<=W\"",
                            )
                        })?;
                        if !bound.is_finite() {
                            return Err(schema(
                                format!("constraints[{i}].bound"),
                                "must be finite",
                            ));
                        }
                        Constraint::leq_bound(body, bound)
                    }
                    other => {
                        return Err(schema(
                            format!("constraints[{i}].direction"),
                            format!("`{other}` is not a direction; expected \">=0\" or \"<=W\""),
                        ))
                    }
                };
                constraints.push(constraint);
            }
            // Multiplier names are reserved by the Lagrangian builder.
            for y in 1..=constraints.len() {
                let mu = format!("mu_{y}");
                if names.iter().any(|n| *n == mu) {
                    return Err(schema(
                        "variables",
                        format!("variable `{mu}` clashes with a reserved multiplier name"),
                    ));
                }
            }
            if raw.positivity.is_some() {
                return Err(schema("positivity", "only applies to scalarize problems"));
            }
            let problem = Problem::new(sense, variables, objectives, constraints)
                .map_err(|e| schema("", e.to_string()))?;
            LoadedKind::Kkt(problem)
        }
        "scalarize" => {
            if raw.sense.is_some() {
                return Err(schema("sense", "not allowed for scalarize problems"));
            }
            if raw.constraints.map(|c| !c.is_empty()).unwrap_or(false) {
                return Err(schema(
                    "constraints",
                    "scalarize problems are box-constrained only",
                ));
            }
            if objectives.len() < 2 {
                return Err(schema("objectives", "scalarize needs at least 2 objectives"));
            }
            let positivity = raw.positivity.unwrap_or(true);
            let problem = ScalarizationProblem::new(variables, objectives, positivity)
                .map_err(|e| schema("", e.to_string()))?;
            LoadedKind::Scalarize(problem)
        }
        other => {
            return Err(schema(
                "kind",
                format!("`{other}` is not a kind; expected \"kkt\" or \"scalarize\""),
            ))
        }
    };

    Ok(LoadedProblem { kind, options })
}
