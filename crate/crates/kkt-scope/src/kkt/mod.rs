//! Multiplier sign analysis for box-domained nonlinear programs.
//!
//! A [`Problem`] couples one or more objectives with inequality constraints
//! (`C(z) >= 0` or `C(z) <= W`). At a query point this module builds the
//! case-specific Lagrangian, estimates the multipliers from stationarity by
//! nonnegative least squares, classifies each multiplier's sign from the
//! gradient-sign truth table, and decides whether the objective gradient
//! lies inside the cone spanned by the signed active-constraint gradients.
//! [`emit_cone_plot_data`] exports the planar picture behind that verdict.

mod nnls;
mod plot;

pub use plot::{emit_cone_plot_data, PlotDataset, PlotRow, RowKind};

use crate::domain::Interval;
use crate::expr::{self, is_valid_identifier, EvalError, ExprAst};
use std::fmt;
use thiserror::Error;

/// Tolerance under which a gradient component counts as zero: sign
/// classification needs strict signs.
pub const SIGN_TOLERANCE: f64 = 1e-9;

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Maximize => "maximize",
            Sense::Minimize => "minimize",
        })
    }
}

/// Constraint shape: `C(z) >= 0` or `C(z) <= W` with a finite bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Relation {
    GeqZero,
    LeqBound(f64),
}

/// One inequality constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub body: ExprAst,
    pub relation: Relation,
}

impl Constraint {
    pub fn geq_zero(body: ExprAst) -> Self {
        Self { body, relation: Relation::GeqZero }
    }

    pub fn leq_bound(body: ExprAst, bound: f64) -> Self {
        Self { body, relation: Relation::LeqBound(bound) }
    }

    /// Boundary residual: distance of `C` from its binding level
    /// (`C` itself for `>= 0`, `C - W` for `<= W`).
    pub fn boundary_residual(&self, value: f64) -> f64 {
        match self.relation {
            Relation::GeqZero => value,
            Relation::LeqBound(w) => value - w,
        }
    }
}

/// Problem classification by sense and constraint directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    Case1,
    Case2,
    Case3Max,
    Case3Min,
    MixedMax,
    MixedMin,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::Case1 => "Case1",
            CaseTag::Case2 => "Case2",
            CaseTag::Case3Max => "Case3Max",
            CaseTag::Case3Min => "Case3Min",
            CaseTag::MixedMax => "MixedMax",
            CaseTag::MixedMin => "MixedMin",
        })
    }
}

/// The four homogeneous cases; mixed problems reduce to one of these per
/// constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PureCase {
    Case1,
    Case2,
    Case3Max,
    Case3Min,
}

impl From<PureCase> for CaseTag {
    fn from(value: PureCase) -> Self {
        match value {
            PureCase::Case1 => CaseTag::Case1,
            PureCase::Case2 => CaseTag::Case2,
            PureCase::Case3Max => CaseTag::Case3Max,
            PureCase::Case3Min => CaseTag::Case3Min,
        }
    }
}

impl fmt::Display for PureCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        CaseTag::from(*self).fmt(f)
    }
}

/// Strict gradient sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradSign {
    Positive,
    Negative,
}

impl fmt::Display for GradSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradSign::Positive => "pos",
            GradSign::Negative => "neg",
        })
    }
}

/// Sign of a scalar gradient; `None` inside the [`SIGN_TOLERANCE`] band.
pub fn gradient_sign(g: f64) -> Option<GradSign> {
    if g.abs() <= SIGN_TOLERANCE {
        None
    } else if g > 0.0 {
        Some(GradSign::Positive)
    } else {
        Some(GradSign::Negative)
    }
}

/// Multiplier sign class: strictly positive, or forced to exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    Positive,
    ForcedZero,
}

impl fmt::Display for SignClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignClass::Positive => "positive",
            SignClass::ForcedZero => "forced_zero",
        })
    }
}

/// Cone membership verdict for the objective gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeVerdict {
    Inside,
    Outside,
}

impl fmt::Display for ConeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConeVerdict::Inside => "inside",
            ConeVerdict::Outside => "outside",
        })
    }
}

/// Errors raised by problem construction and analysis. Indices in messages
/// are 1-based to match the `O1`/`C1`/`mu_1` naming used in reports.
#[derive(Debug, Error)]
pub enum KktError {
    #[error("problem must declare at least one objective")]
    NoObjectives,
    #[error("problem must declare at least one constraint")]
    NoConstraints,
    #[error("`{0}` is not a valid variable name")]
    InvalidVariableName(String),
    #[error("variable `{0}` is declared more than once")]
    DuplicateVariable(String),
    #[error("domain of `{name}` is not a finite non-empty interval")]
    EmptyDomain { name: String },
    #[error("{context} references undeclared variable `{name}`")]
    UndeclaredVariable { context: String, name: String },
    #[error("constraint C{constraint} has a non-finite bound")]
    NonFiniteBound { constraint: usize },
    #[error("variable `{0}` clashes with a reserved multiplier name")]
    VariableNameClash(String),
    #[error("objective index {index} out of range (problem has {count} objectives)")]
    ObjectiveIndex { index: usize, count: usize },
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("coordinate `{name}` = {value} lies outside the domain box")]
    PointOutsideDomain { name: String, value: f64 },
    #[error("tolerance must be positive")]
    InvalidTolerance,
    #[error("grid size must be positive")]
    InvalidGrid,
    #[error("cone plots need exactly 2 variables, problem has {0}")]
    PlotDimension(usize),
    #[error("objective O{objective} has a (near-)zero gradient at the query point")]
    ZeroObjectiveGradient { objective: usize },
    #[error("constraint C{constraint} has a (near-)zero gradient at the query point")]
    ZeroConstraintGradient { constraint: usize },
    #[error("evaluating {context}: {source}")]
    Eval { context: String, source: EvalError },
}

/// A nonlinear program over a closed box domain.
#[derive(Debug, Clone)]
pub struct Problem {
    sense: Sense,
    variables: Vec<String>,
    domain: Vec<Interval>,
    objectives: Vec<ExprAst>,
    constraints: Vec<Constraint>,
}

impl Problem {
    pub fn new(
        sense: Sense,
        variables: Vec<(String, Interval)>,
        objectives: Vec<ExprAst>,
        constraints: Vec<Constraint>,
    ) -> Result<Self, KktError> {
        if objectives.is_empty() {
            return Err(KktError::NoObjectives);
        }
        if constraints.is_empty() {
            return Err(KktError::NoConstraints);
        }
        let mut names = Vec::with_capacity(variables.len());
        let mut box_ = Vec::with_capacity(variables.len());
        for (name, interval) in variables {
            if !is_valid_identifier(&name) {
                return Err(KktError::InvalidVariableName(name));
            }
            if names.contains(&name) {
                return Err(KktError::DuplicateVariable(name));
            }
            if !interval.is_valid() {
                return Err(KktError::EmptyDomain { name });
            }
            names.push(name);
            box_.push(interval);
        }
        for (x, obj) in objectives.iter().enumerate() {
            check_declared(obj, &names, &format!("objective O{}", x + 1))?;
        }
        for (y, c) in constraints.iter().enumerate() {
            check_declared(&c.body, &names, &format!("constraint C{}", y + 1))?;
            if let Relation::LeqBound(w) = c.relation {
                if !w.is_finite() {
                    return Err(KktError::NonFiniteBound { constraint: y + 1 });
                }
            }
        }
        Ok(Self { sense, variables: names, domain: box_, objectives, constraints })
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn objectives(&self) -> &[ExprAst] {
        &self.objectives
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Soft diagnostics: the sign conventions assume positive upper bounds,
    /// so `W <= 0` is flagged without being rejected.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (y, c) in self.constraints.iter().enumerate() {
            if let Relation::LeqBound(w) = c.relation {
                if w <= 0.0 {
                    out.push(format!(
                        "constraint C{} has non-positive bound W = {w}; the sign conventions assume W > 0",
                        y + 1
                    ));
                }
            }
        }
        out
    }

    fn check_point(&self, point: &[f64]) -> Result<(), KktError> {
        if point.len() != self.variables.len() {
            return Err(KktError::Dimension {
                expected: self.variables.len(),
                got: point.len(),
            });
        }
        for ((name, interval), &value) in
            self.variables.iter().zip(&self.domain).zip(point)
        {
            if !interval.contains(value) {
                return Err(KktError::PointOutsideDomain { name: name.clone(), value });
            }
        }
        Ok(())
    }
}

fn check_declared(expr: &ExprAst, names: &[String], context: &str) -> Result<(), KktError> {
    for v in expr.variables() {
        if !names.iter().any(|n| *n == v) {
            return Err(KktError::UndeclaredVariable {
                context: context.to_string(),
                name: v,
            });
        }
    }
    Ok(())
}

/// Tags the problem from its sense and the multiset of constraint
/// directions. Mixed directions map to the extended (mixed) cases.
pub fn classify_case(problem: &Problem) -> CaseTag {
    let all_geq = problem
        .constraints
        .iter()
        .all(|c| matches!(c.relation, Relation::GeqZero));
    let all_leq = problem
        .constraints
        .iter()
        .all(|c| matches!(c.relation, Relation::LeqBound(_)));
    match (problem.sense, all_geq, all_leq) {
        (Sense::Maximize, true, _) => CaseTag::Case1,
        (Sense::Minimize, _, true) => CaseTag::Case2,
        (Sense::Maximize, _, true) => CaseTag::Case3Max,
        (Sense::Minimize, true, _) => CaseTag::Case3Min,
        (Sense::Maximize, false, false) => CaseTag::MixedMax,
        (Sense::Minimize, false, false) => CaseTag::MixedMin,
    }
}

/// The homogeneous case governing a single constraint under the given sense.
pub fn constraint_case(sense: Sense, relation: &Relation) -> PureCase {
    match (sense, relation) {
        (Sense::Maximize, Relation::GeqZero) => PureCase::Case1,
        (Sense::Minimize, Relation::LeqBound(_)) => PureCase::Case2,
        (Sense::Maximize, Relation::LeqBound(_)) => PureCase::Case3Max,
        (Sense::Minimize, Relation::GeqZero) => PureCase::Case3Min,
    }
}

/// Sign with which a constraint gradient enters the stationarity
/// decomposition `grad O = sum_y mu_y * s_y * grad C_y`.
pub fn stationarity_sign(sense: Sense, relation: &Relation) -> f64 {
    match (sense, relation) {
        (Sense::Maximize, Relation::LeqBound(_)) | (Sense::Minimize, Relation::GeqZero) => 1.0,
        (Sense::Maximize, Relation::GeqZero) | (Sense::Minimize, Relation::LeqBound(_)) => -1.0,
    }
}

/// Multiplier sign from the gradient-sign truth table: the homogeneous
/// Cases 1 and 2 admit a positive multiplier exactly when the objective and
/// constraint gradients disagree in sign, Case 3 (either sense) exactly when
/// they agree.
pub fn classify_multiplier_sign(
    grad_o: GradSign,
    grad_c: GradSign,
    case: PureCase,
) -> SignClass {
    let same = grad_o == grad_c;
    match case {
        PureCase::Case1 | PureCase::Case2 => {
            if same {
                SignClass::ForcedZero
            } else {
                SignClass::Positive
            }
        }
        PureCase::Case3Max | PureCase::Case3Min => {
            if same {
                SignClass::Positive
            } else {
                SignClass::ForcedZero
            }
        }
    }
}

/// Builds the Lagrangian for objective `objective` (0-based) with formal
/// multiplier variables `mu_1..mu_n`:
///
/// * maximize: `L = O - sum_y mu_y * g_y`
/// * minimize: `L = O + sum_y mu_y * g_y`
///
/// where `g_y = C_y - W_y` for `<= W` constraints and `g_y = -C_y` for
/// `>= 0` constraints.
pub fn build_lagrangian(problem: &Problem, objective: usize) -> Result<ExprAst, KktError> {
    if objective >= problem.objectives.len() {
        return Err(KktError::ObjectiveIndex {
            index: objective,
            count: problem.objectives.len(),
        });
    }
    for y in 1..=problem.constraints.len() {
        let mu = format!("mu_{y}");
        if problem.variables.iter().any(|v| *v == mu) {
            return Err(KktError::VariableNameClash(mu));
        }
    }
    let mut lagrangian = problem.objectives[objective].clone();
    for (y, c) in problem.constraints.iter().enumerate() {
        let slack = match c.relation {
            Relation::LeqBound(w) => ExprAst::sub(c.body.clone(), ExprAst::constant(w)),
            Relation::GeqZero => ExprAst::neg(c.body.clone()),
        };
        let term = ExprAst::mul(ExprAst::variable(format!("mu_{}", y + 1)), slack);
        lagrangian = match problem.sense {
            Sense::Maximize => ExprAst::sub(lagrangian, term),
            Sense::Minimize => ExprAst::add(lagrangian, term),
        };
    }
    Ok(lagrangian)
}

/// Indices (0-based, ascending) of constraints holding with equality at
/// `point`, within `tol`.
pub fn active_set(problem: &Problem, point: &[f64], tol: f64) -> Result<Vec<usize>, KktError> {
    if !(tol > 0.0) {
        return Err(KktError::InvalidTolerance);
    }
    problem.check_point(point)?;
    let mut active = Vec::new();
    for (y, c) in problem.constraints.iter().enumerate() {
        let value = expr::evaluate_at(&c.body, &problem.variables, point).map_err(|source| {
            KktError::Eval { context: format!("constraint C{}", y + 1), source }
        })?;
        if c.boundary_residual(value).abs() <= tol {
            active.push(y);
        }
    }
    Ok(active)
}

/// Cone membership decision with the witness found by nonnegative least
/// squares.
#[derive(Debug, Clone)]
pub struct ConeMembership {
    pub verdict: ConeVerdict,
    /// Nonnegative coefficients over the generators, in input order.
    pub coefficients: Vec<f64>,
    /// Achieved `||grad_o - sum coefficients[j] * generators[j]||`.
    pub residual: f64,
}

/// Decides whether `grad_o` lies in the conic hull of `generators`
/// (case-signed constraint gradients). Inside means the best nonnegative
/// combination reaches `grad_o` within `tol * (1 + ||grad_o||)`.
pub fn cone_membership(grad_o: &[f64], generators: &[Vec<f64>], tol: f64) -> ConeMembership {
    assert!(!generators.is_empty(), "cone membership needs at least one generator");
    assert!(
        grad_o.iter().all(|v| v.is_finite())
            && generators.iter().flatten().all(|v| v.is_finite()),
        "cone membership needs finite inputs"
    );
    let solution = nnls::nnls(generators, grad_o);
    let scale = 1.0 + grad_o.iter().map(|v| v * v).sum::<f64>().sqrt();
    let verdict = if solution.residual <= tol * scale {
        ConeVerdict::Inside
    } else {
        ConeVerdict::Outside
    };
    ConeMembership {
        verdict,
        coefficients: solution.coefficients,
        residual: solution.residual,
    }
}

/// Multiplier value and sign class for one constraint.
#[derive(Debug, Clone)]
pub struct ConstraintMultiplier {
    /// 0-based constraint index.
    pub constraint: usize,
    pub value: f64,
    pub sign: SignClass,
    pub active: bool,
}

/// Stationarity-based multiplier estimate for one objective.
#[derive(Debug, Clone)]
pub struct MultiplierEstimate {
    /// 0-based objective index.
    pub objective: usize,
    /// One entry per constraint; inactive constraints carry an exact zero.
    pub multipliers: Vec<ConstraintMultiplier>,
    /// Norm of `grad O - sum_y mu_y * s_y * grad C_y` at the query point.
    pub residual: f64,
}

fn objective_gradient(
    problem: &Problem,
    objective: usize,
    point: &[f64],
) -> Result<Vec<f64>, KktError> {
    let grad = expr::gradient(&problem.objectives[objective], &problem.variables, point)
        .map_err(|source| KktError::Eval {
            context: format!("objective O{}", objective + 1),
            source,
        })?;
    let norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= SIGN_TOLERANCE {
        return Err(KktError::ZeroObjectiveGradient { objective: objective + 1 });
    }
    Ok(grad)
}

fn constraint_gradient(
    problem: &Problem,
    constraint: usize,
    point: &[f64],
) -> Result<Vec<f64>, KktError> {
    let grad = expr::gradient(
        &problem.constraints[constraint].body,
        &problem.variables,
        point,
    )
    .map_err(|source| KktError::Eval {
        context: format!("constraint C{}", constraint + 1),
        source,
    })?;
    let norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= SIGN_TOLERANCE {
        return Err(KktError::ZeroConstraintGradient { constraint: constraint + 1 });
    }
    Ok(grad)
}

/// Solves the stationarity condition `grad_z L = 0` for `mu >= 0` at
/// `point`.
///
/// Inactive constraints receive an exact zero by complementary slackness and
/// never enter the least-squares system. With a scalar variable and a single
/// active constraint the estimate is the closed-form case-signed gradient
/// ratio; otherwise nonnegative least squares minimizes the stationarity
/// residual, clamping infeasible directions to zero (`forced_zero`).
pub fn estimate_multiplier(
    problem: &Problem,
    objective: usize,
    point: &[f64],
    tol: f64,
) -> Result<MultiplierEstimate, KktError> {
    if objective >= problem.objectives.len() {
        return Err(KktError::ObjectiveIndex {
            index: objective,
            count: problem.objectives.len(),
        });
    }
    let active = active_set(problem, point, tol)?;
    let grad_o = objective_gradient(problem, objective, point)?;
    let grad_o_norm = grad_o.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut multipliers: Vec<ConstraintMultiplier> = (0..problem.constraints.len())
        .map(|y| ConstraintMultiplier {
            constraint: y,
            value: 0.0,
            sign: SignClass::ForcedZero,
            active: false,
        })
        .collect();

    if active.is_empty() {
        // No active cone: every multiplier vanishes and the stationarity
        // residual is the full objective gradient.
        return Ok(MultiplierEstimate { objective, multipliers, residual: grad_o_norm });
    }

    let mut generators = Vec::with_capacity(active.len());
    for &y in &active {
        let grad_c = constraint_gradient(problem, y, point)?;
        let sign = stationarity_sign(problem.sense, &problem.constraints[y].relation);
        generators.push(grad_c.iter().map(|g| sign * g).collect::<Vec<f64>>());
        multipliers[y].active = true;
    }

    let (values, residual) = if problem.variables.len() == 1 && active.len() == 1 {
        // Closed-form scalar ratio: mu = s * grad O / grad C, clamped to the
        // feasible sign.
        let ratio = grad_o[0] / generators[0][0];
        if ratio > 0.0 {
            (vec![ratio], (grad_o[0] - ratio * generators[0][0]).abs())
        } else {
            (vec![0.0], grad_o[0].abs())
        }
    } else {
        let solution = nnls::nnls(&generators, &grad_o);
        (solution.coefficients, solution.residual)
    };

    for (&y, value) in active.iter().zip(values) {
        multipliers[y].value = value;
        multipliers[y].sign = if value > 0.0 {
            SignClass::Positive
        } else {
            SignClass::ForcedZero
        };
    }
    Ok(MultiplierEstimate { objective, multipliers, residual })
}

/// Truth-table prediction for one constraint of a single-variable problem.
#[derive(Debug, Clone)]
pub struct SignPrediction {
    /// 0-based constraint index.
    pub constraint: usize,
    pub grad_o: GradSign,
    pub grad_c: GradSign,
    pub case: PureCase,
    pub sign: SignClass,
}

/// Per-objective analysis assembled by [`analyze`].
#[derive(Debug, Clone)]
pub struct ObjectiveAnalysis {
    /// 0-based objective index.
    pub objective: usize,
    pub estimate: MultiplierEstimate,
    pub cone: ConeMembership,
    /// Gradient-sign classification per constraint; populated only for
    /// single-variable problems where strict scalar signs exist.
    pub sign_table: Vec<SignPrediction>,
}

/// Full deterministic report at a query point.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub case: CaseTag,
    /// 0-based indices of active constraints, ascending.
    pub active: Vec<usize>,
    pub objectives: Vec<ObjectiveAnalysis>,
}

/// Composes case classification, multiplier estimation, cone membership, and
/// (for scalar problems) the sign truth table, independently per objective.
pub fn analyze(problem: &Problem, point: &[f64], tol: f64) -> Result<Analysis, KktError> {
    let case = classify_case(problem);
    let active = active_set(problem, point, tol)?;
    let scalar = problem.variables.len() == 1;

    let mut objectives = Vec::with_capacity(problem.objectives.len());
    for x in 0..problem.objectives.len() {
        let estimate = estimate_multiplier(problem, x, point, tol)?;
        let grad_o = objective_gradient(problem, x, point)?;
        let cone = if active.is_empty() {
            // The cone of an empty active set is the origin; a nonzero
            // objective gradient is always outside it.
            ConeMembership {
                verdict: ConeVerdict::Outside,
                coefficients: Vec::new(),
                residual: estimate.residual,
            }
        } else {
            let mut generators = Vec::with_capacity(active.len());
            for &y in &active {
                let grad_c = constraint_gradient(problem, y, point)?;
                let sign = stationarity_sign(problem.sense, &problem.constraints[y].relation);
                generators.push(grad_c.iter().map(|g| sign * g).collect::<Vec<f64>>());
            }
            cone_membership(&grad_o, &generators, tol)
        };

        let mut sign_table = Vec::new();
        if scalar {
            let o_sign = gradient_sign(grad_o[0])
                .ok_or(KktError::ZeroObjectiveGradient { objective: x + 1 })?;
            for (y, c) in problem.constraints.iter().enumerate() {
                let grad_c = expr::gradient(&c.body, &problem.variables, point).map_err(
                    |source| KktError::Eval {
                        context: format!("constraint C{}", y + 1),
                        source,
                    },
                )?;
                let c_sign = gradient_sign(grad_c[0])
                    .ok_or(KktError::ZeroConstraintGradient { constraint: y + 1 })?;
                let pure = constraint_case(problem.sense, &c.relation);
                sign_table.push(SignPrediction {
                    constraint: y,
                    grad_o: o_sign,
                    grad_c: c_sign,
                    case: pure,
                    sign: classify_multiplier_sign(o_sign, c_sign, pure),
                });
            }
        }

        objectives.push(ObjectiveAnalysis { objective: x, estimate, cone, sign_table });
    }

    Ok(Analysis { case, active, objectives })
}
