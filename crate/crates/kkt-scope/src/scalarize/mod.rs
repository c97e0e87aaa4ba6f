//! Weighted-sum scalarization of multi-objective problems.
//!
//! `n` objectives over a box-domained resource vector are collapsed into the
//! cost `E(beta, r) = sum_{x<n} beta_x * O_x(r) + (1 - sum beta_x) * O_n(r)`
//! with simplex weights. The module samples the value function
//! `E*(beta) = min_r E(beta, r)`, probes its curvature in both inequality
//! directions, evaluates the envelope derivative at inner minimizers,
//! maximizes `E*` over the weight simplex, and checks the degenerate limit
//! in which every objective but the first vanishes.

use crate::domain::{try_scan_grid, Interval};
use crate::expr::{self, is_valid_identifier, EvalError, ExprAst};
use rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Bracket width at which the coordinate refinement stops.
const REFINE_TOLERANCE: f64 = 1e-9;

/// Slack allowed when validating simplex coordinates, absorbing float dust
/// from lattice arithmetic.
const SIMPLEX_SLACK: f64 = 1e-12;

/// Errors raised by scalarization problems and their operations.
#[derive(Debug, Error)]
pub enum ScalarizeError {
    #[error("scalarization needs at least 2 objectives, got {0}")]
    TooFewObjectives(usize),
    #[error("resource dimension {0} exceeds the supported maximum of 3")]
    DimensionTooLarge(usize),
    #[error("`{0}` is not a valid variable name")]
    InvalidVariableName(String),
    #[error("variable `{0}` is declared more than once")]
    DuplicateVariable(String),
    #[error("domain of `{name}` is not a bounded non-empty interval")]
    BadDomain { name: String },
    #[error("{context} references undeclared variable `{name}`")]
    UndeclaredVariable { context: String, name: String },
    #[error("simplex violation: {0}")]
    SimplexViolation(String),
    #[error("weight vector has {got} coordinates, problem needs {expected}")]
    WeightDimension { expected: usize, got: usize },
    #[error("expected {expected} resource coordinates, got {got}")]
    PointDimension { expected: usize, got: usize },
    #[error("point {at:?} lies outside the resource domain")]
    PointOutsideDomain { at: Vec<f64> },
    #[error("grid must have at least 2 points per dimension")]
    InvalidGrid,
    #[error("curvature probe requires at least one trial")]
    InvalidTrials,
    #[error("objective O{objective} is not identically zero: value {value} at r = {at:?}")]
    PremiseViolation { objective: usize, value: f64, at: Vec<f64> },
    #[error("evaluating at r = {at:?}: {source}")]
    Eval { at: Vec<f64>, source: EvalError },
}

/// `n >= 2` objectives over a bounded resource box.
#[derive(Debug, Clone)]
pub struct ScalarizationProblem {
    objectives: Vec<ExprAst>,
    variables: Vec<String>,
    domain: Vec<Interval>,
    positivity_expected: bool,
}

impl ScalarizationProblem {
    pub fn new(
        variables: Vec<(String, Interval)>,
        objectives: Vec<ExprAst>,
        positivity_expected: bool,
    ) -> Result<Self, ScalarizeError> {
        if objectives.len() < 2 {
            return Err(ScalarizeError::TooFewObjectives(objectives.len()));
        }
        if variables.len() > 3 {
            return Err(ScalarizeError::DimensionTooLarge(variables.len()));
        }
        let mut names = Vec::with_capacity(variables.len());
        let mut box_ = Vec::with_capacity(variables.len());
        for (name, interval) in variables {
            if !is_valid_identifier(&name) {
                return Err(ScalarizeError::InvalidVariableName(name));
            }
            if names.contains(&name) {
                return Err(ScalarizeError::DuplicateVariable(name));
            }
            if !interval.is_valid() {
                return Err(ScalarizeError::BadDomain { name });
            }
            names.push(name);
            box_.push(interval);
        }
        for (x, obj) in objectives.iter().enumerate() {
            for v in obj.variables() {
                if !names.iter().any(|n| *n == v) {
                    return Err(ScalarizeError::UndeclaredVariable {
                        context: format!("objective O{}", x + 1),
                        name: v,
                    });
                }
            }
        }
        Ok(Self { objectives, variables: names, domain: box_, positivity_expected })
    }

    pub fn objectives(&self) -> &[ExprAst] {
        &self.objectives
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn positivity_expected(&self) -> bool {
        self.positivity_expected
    }

    fn check_weight(&self, beta: &WeightVector) -> Result<(), ScalarizeError> {
        if beta.objectives() != self.objectives.len() {
            return Err(ScalarizeError::WeightDimension {
                expected: self.objectives.len() - 1,
                got: beta.dim(),
            });
        }
        Ok(())
    }

    fn check_point(&self, r: &[f64]) -> Result<(), ScalarizeError> {
        if r.len() != self.variables.len() {
            return Err(ScalarizeError::PointDimension {
                expected: self.variables.len(),
                got: r.len(),
            });
        }
        if !self.domain.iter().zip(r).all(|(iv, &v)| iv.contains(v)) {
            return Err(ScalarizeError::PointOutsideDomain { at: r.to_vec() });
        }
        Ok(())
    }

    /// Samples every objective at seeded points, reporting where the
    /// expected positivity fails. Empty when `positivity_expected` is off.
    pub fn positivity_warnings(&self, seed: u64, samples: usize) -> Vec<String> {
        if !self.positivity_expected {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: Vec<Option<(f64, Vec<f64>)>> = vec![None; self.objectives.len()];
        for _ in 0..samples {
            let r: Vec<f64> = self
                .domain
                .iter()
                .map(|iv| iv.lower + iv.width() * unit_closed_open(&mut rng))
                .collect();
            for (x, obj) in self.objectives.iter().enumerate() {
                if let Ok(v) = expr::evaluate_at(obj, &self.variables, &r) {
                    if v <= 0.0 && worst[x].as_ref().map(|(w, _)| v < *w).unwrap_or(true) {
                        worst[x] = Some((v, r.clone()));
                    }
                }
            }
        }
        worst
            .into_iter()
            .enumerate()
            .filter_map(|(x, w)| {
                w.map(|(v, r)| {
                    format!(
                        "objective O{} is non-positive ({v}) at r = {r:?}; positivity was expected",
                        x + 1
                    )
                })
            })
            .collect()
    }
}

/// Simplex weights `beta_1..beta_{n-1}`; the trailing weight is derived as
/// `1 - sum`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    head: Vec<f64>,
}

impl WeightVector {
    /// Validates `0 <= beta_x <= 1` and `sum <= 1`.
    pub fn new(head: Vec<f64>) -> Result<Self, ScalarizeError> {
        if head.is_empty() {
            return Err(ScalarizeError::SimplexViolation(
                "weight vector needs at least one coordinate".into(),
            ));
        }
        for (i, &b) in head.iter().enumerate() {
            if !((-SIMPLEX_SLACK..=1.0 + SIMPLEX_SLACK).contains(&b)) {
                return Err(ScalarizeError::SimplexViolation(format!(
                    "beta_{} = {b} outside [0, 1]",
                    i + 1
                )));
            }
        }
        let sum: f64 = head.iter().sum();
        if sum > 1.0 + SIMPLEX_SLACK {
            return Err(ScalarizeError::SimplexViolation(format!(
                "weights sum to {sum} > 1"
            )));
        }
        Ok(Self { head })
    }

    /// The explicit weights `beta_1..beta_{n-1}`.
    pub fn head(&self) -> &[f64] {
        &self.head
    }

    pub fn dim(&self) -> usize {
        self.head.len()
    }

    /// Number of objectives this weight vector addresses (`head + 1`).
    pub fn objectives(&self) -> usize {
        self.head.len() + 1
    }

    /// Derived trailing weight `beta_n = 1 - sum`.
    pub fn last(&self) -> f64 {
        (1.0 - self.head.iter().sum::<f64>()).clamp(0.0, 1.0)
    }

    /// All `n` weights.
    pub fn full(&self) -> Vec<f64> {
        let mut all = self.head.clone();
        all.push(self.last());
        all
    }

    /// Convex combination `alpha * a + (1 - alpha) * b`.
    pub fn combine(a: &Self, b: &Self, alpha: f64) -> Result<Self, ScalarizeError> {
        assert_eq!(a.dim(), b.dim(), "weight dimensions must match");
        assert!((0.0..=1.0).contains(&alpha), "alpha must lie in [0, 1]");
        let head = a
            .head
            .iter()
            .zip(&b.head)
            .map(|(x, y)| alpha * x + (1.0 - alpha) * y)
            .collect();
        Self::new(head)
    }

    /// Regular simplex lattice: every weight vector with coordinates
    /// `k / divisions` summing to at most 1, in lexicographic order.
    pub fn lattice(head_dims: usize, divisions: usize) -> Vec<WeightVector> {
        assert!(head_dims >= 1 && divisions >= 1);
        let mut out = Vec::new();
        let mut ks = vec![0usize; head_dims];
        fn rec(ks: &mut Vec<usize>, dim: usize, remaining: usize, divisions: usize, out: &mut Vec<WeightVector>) {
            if dim + 1 == ks.len() {
                for k in 0..=remaining {
                    ks[dim] = k;
                    let head: Vec<f64> =
                        ks.iter().map(|&k| k as f64 / divisions as f64).collect();
                    out.push(WeightVector { head });
                }
                return;
            }
            for k in 0..=remaining {
                ks[dim] = k;
                rec(ks, dim + 1, remaining - k, divisions, out);
            }
        }
        rec(&mut ks, 0, divisions, divisions, &mut out);
        out
    }
}

fn eval_with_r(
    ast: &ExprAst,
    vars: &[String],
    r: &[f64],
) -> Result<f64, ScalarizeError> {
    expr::evaluate_at(ast, vars, r).map_err(|source| ScalarizeError::Eval {
        at: r.to_vec(),
        source,
    })
}

/// The weighted cost `E(beta, r)`.
pub fn cost(
    problem: &ScalarizationProblem,
    beta: &WeightVector,
    r: &[f64],
) -> Result<f64, ScalarizeError> {
    problem.check_weight(beta)?;
    problem.check_point(r)?;
    let n = problem.objectives.len();
    let mut total = 0.0;
    for (x, obj) in problem.objectives.iter().enumerate() {
        let weight = if x + 1 == n { beta.last() } else { beta.head[x] };
        total += weight * eval_with_r(obj, &problem.variables, r)?;
    }
    Ok(total)
}

/// One point of the value-function curve `beta -> (r*, E*)`.
#[derive(Debug, Clone)]
pub struct EStarSample {
    pub beta: WeightVector,
    pub r_star: Vec<f64>,
    pub e_star: f64,
    /// Final bracket width of the local refinement.
    pub inner_residual: f64,
}

/// Golden-section minimization on `[lo, hi]`, seeded with a best-so-far
/// point so plateaus keep the incoming (lexicographically earliest) value.
/// Returns `(x_best, f_best, final_width)`.
fn golden_section<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    lo: f64,
    hi: f64,
    seed_x: f64,
    seed_f: f64,
    tol: f64,
) -> Result<(f64, f64, f64), E> {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (lo, hi);
    let mut best_x = seed_x;
    let mut best_f = seed_f;
    if hi - lo <= tol {
        return Ok((best_x, best_f, hi - lo));
    }
    let mut c = hi - INVPHI * (hi - lo);
    let mut d = lo + INVPHI * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    if fc < best_f {
        best_x = c;
        best_f = fc;
    }
    if fd < best_f {
        best_x = d;
        best_f = fd;
    }
    let mut iterations = 0;
    while hi - lo > tol && iterations < 200 {
        iterations += 1;
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INVPHI * (hi - lo);
            fc = f(c)?;
            if fc < best_f {
                best_x = c;
                best_f = fc;
            }
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INVPHI * (hi - lo);
            fd = f(d)?;
            if fd < best_f {
                best_x = d;
                best_f = fd;
            }
        }
    }
    Ok((best_x, best_f, hi - lo))
}

/// Minimizes `E(beta, .)` over the resource box: a row-major grid scan
/// (`grid` points per dimension, ties to the lexicographically smallest
/// point) followed by per-coordinate golden-section refinement.
pub fn inner_minimize(
    problem: &ScalarizationProblem,
    beta: &WeightVector,
    grid: usize,
) -> Result<EStarSample, ScalarizeError> {
    if grid < 2 {
        return Err(ScalarizeError::InvalidGrid);
    }
    problem.check_weight(beta)?;

    let mut best: Option<(Vec<f64>, f64)> = None;
    try_scan_grid(&problem.domain, grid, |r| {
        let v = cost(problem, beta, r)?;
        if best.as_ref().map(|(_, bv)| v < *bv).unwrap_or(true) {
            best = Some((r.to_vec(), v));
        }
        Ok(())
    })?;
    let (mut r_star, mut e_star) = best.expect("grid scan visits at least one point");

    let cells: Vec<f64> = problem
        .domain
        .iter()
        .map(|iv| iv.width() / (grid - 1) as f64)
        .collect();
    let mut width = 0.0;
    for _sweep in 0..100 {
        let mut moved = 0.0f64;
        width = 0.0f64;
        for i in 0..problem.variables.len() {
            let lo = (r_star[i] - cells[i]).max(problem.domain[i].lower);
            let hi = (r_star[i] + cells[i]).min(problem.domain[i].upper);
            let mut scratch = r_star.clone();
            let objective = |xi: f64| {
                scratch[i] = xi;
                cost(problem, beta, &scratch)
            };
            let (x, value, w) =
                golden_section(objective, lo, hi, r_star[i], e_star, REFINE_TOLERANCE)?;
            moved = moved.max((x - r_star[i]).abs());
            width = width.max(w);
            r_star[i] = x;
            e_star = value;
        }
        if moved <= REFINE_TOLERANCE {
            break;
        }
    }

    Ok(EStarSample { beta: beta.clone(), r_star, e_star, inner_residual: width })
}

/// The sampled value function over a regular simplex lattice.
#[derive(Debug, Clone)]
pub struct EStarCurve {
    pub samples: Vec<EStarSample>,
    pub beta_grid: usize,
}

/// Solves the inner minimization on every lattice weight. Lattice points are
/// independent, so they run in parallel; the output order is always the
/// lexicographic lattice order.
pub fn sample_estar_curve(
    problem: &ScalarizationProblem,
    beta_grid: usize,
    inner_grid: usize,
) -> Result<EStarCurve, ScalarizeError> {
    if beta_grid < 2 {
        return Err(ScalarizeError::InvalidGrid);
    }
    let lattice = WeightVector::lattice(problem.objectives.len() - 1, beta_grid);
    let samples: Result<Vec<EStarSample>, ScalarizeError> = lattice
        .into_par_iter()
        .map(|beta| inner_minimize(problem, &beta, inner_grid))
        .collect();
    Ok(EStarCurve { samples: samples?, beta_grid })
}

/// One curvature trial: weights `beta`, `beta'`, mixing coefficient `alpha`,
/// and the slack of the convexity inequality in both directions.
///
/// `slack_paper >= 0` means
/// `E*(alpha beta + (1-alpha) beta') <= alpha E*(beta) + (1-alpha) E*(beta')`
/// held (the convex direction); `slack_reverse = -slack_paper`.
#[derive(Debug, Clone)]
pub struct CurvatureTrial {
    pub beta: WeightVector,
    pub beta_prime: WeightVector,
    pub alpha: f64,
    pub slack_paper: f64,
    pub slack_reverse: f64,
}

/// Outcome of [`check_estar_curvature`].
#[derive(Debug, Clone)]
pub struct CurvatureProbe {
    pub trials: Vec<CurvatureTrial>,
    /// Tolerance used for the sign statistics.
    pub tolerance: f64,
}

/// Sign statistics of `slack_paper` at the probe tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlackSignCounts {
    pub positive: usize,
    pub zero: usize,
    pub negative: usize,
}

impl CurvatureProbe {
    /// Trials where the convex-direction inequality held within tolerance.
    pub fn convex_direction_holds(&self) -> usize {
        self.trials
            .iter()
            .filter(|t| t.slack_paper >= -self.tolerance)
            .count()
    }

    /// Trials where the concave-direction inequality held within tolerance.
    pub fn concave_direction_holds(&self) -> usize {
        self.trials
            .iter()
            .filter(|t| t.slack_reverse >= -self.tolerance)
            .count()
    }

    pub fn sign_counts(&self) -> SlackSignCounts {
        let mut counts = SlackSignCounts { positive: 0, zero: 0, negative: 0 };
        for t in &self.trials {
            if t.slack_paper > self.tolerance {
                counts.positive += 1;
            } else if t.slack_paper < -self.tolerance {
                counts.negative += 1;
            } else {
                counts.zero += 1;
            }
        }
        counts
    }
}

/// Uniform in `[0, 1)` from the raw 64-bit stream; value-stable across
/// dependency upgrades.
fn unit_closed_open(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Uniform in `(0, 1]`; safe under `ln`.
fn unit_open_closed(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64
}

/// Uniform sample from the weight simplex (exponential gaps).
fn sample_simplex(rng: &mut ChaCha8Rng, objectives: usize) -> WeightVector {
    let exps: Vec<f64> = (0..objectives)
        .map(|_| -unit_open_closed(rng).ln())
        .collect();
    let total: f64 = exps.iter().sum();
    let head = exps[..objectives - 1]
        .iter()
        .map(|e| (e / total).clamp(0.0, 1.0))
        .collect();
    WeightVector::new(head).expect("normalized simplex sample is valid")
}

/// Draws `(beta, beta', alpha)` triples from a seeded generator and measures
/// the slack of the value-function convexity inequality in both directions.
/// Nothing is asserted here: the probe reports what it measured.
pub fn check_estar_curvature(
    problem: &ScalarizationProblem,
    trials: usize,
    seed: u64,
    inner_grid: usize,
) -> Result<CurvatureProbe, ScalarizeError> {
    if trials == 0 {
        return Err(ScalarizeError::InvalidTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = problem.objectives.len();
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let beta = sample_simplex(&mut rng, n);
        let beta_prime = sample_simplex(&mut rng, n);
        let alpha = unit_closed_open(&mut rng);
        let combined = WeightVector::combine(&beta, &beta_prime, alpha)?;
        let e_beta = inner_minimize(problem, &beta, inner_grid)?.e_star;
        let e_prime = inner_minimize(problem, &beta_prime, inner_grid)?.e_star;
        let e_combined = inner_minimize(problem, &combined, inner_grid)?.e_star;
        let slack_paper = alpha * e_beta + (1.0 - alpha) * e_prime - e_combined;
        out.push(CurvatureTrial {
            beta,
            beta_prime,
            alpha,
            slack_paper,
            slack_reverse: -slack_paper,
        });
    }
    Ok(CurvatureProbe { trials: out, tolerance: 1e-9 })
}

/// Envelope derivative of the value function at an inner minimizer: with
/// `r*` held fixed, `dE*/dbeta_x = O_x(r*) - O_n(r*)` exactly, because the
/// cost is affine in the weights and the inner term vanishes at the
/// minimizer.
pub fn envelope_derivative(
    problem: &ScalarizationProblem,
    beta: &WeightVector,
    sample: &EStarSample,
) -> Result<Vec<f64>, ScalarizeError> {
    problem.check_weight(beta)?;
    debug_assert_eq!(beta, &sample.beta, "sample must come from this beta");
    let n = problem.objectives.len();
    let o_n = eval_with_r(&problem.objectives[n - 1], &problem.variables, &sample.r_star)?;
    let mut out = Vec::with_capacity(n - 1);
    for obj in &problem.objectives[..n - 1] {
        let o_x = eval_with_r(obj, &problem.variables, &sample.r_star)?;
        out.push(o_x - o_n);
    }
    Ok(out)
}

/// Maximizes the value function over the weight simplex: lattice scan
/// (ties to the lexicographically smallest weight) followed by projected
/// coordinate ascent with step halving from `1/beta_grid` down to `1e-6`.
pub fn outer_maximize_beta(
    problem: &ScalarizationProblem,
    beta_grid: usize,
    inner_grid: usize,
) -> Result<(WeightVector, EStarSample), ScalarizeError> {
    let curve = sample_estar_curve(problem, beta_grid, inner_grid)?;
    let mut best = curve
        .samples
        .into_iter()
        .reduce(|best, s| if s.e_star > best.e_star { s } else { best })
        .expect("lattice is never empty");

    let head_dims = problem.objectives.len() - 1;
    let mut step = 1.0 / beta_grid as f64;
    while step >= 1e-6 {
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..head_dims {
                for direction in [1.0f64, -1.0] {
                    let head = best.beta.head();
                    let sum: f64 = head.iter().sum();
                    let headroom = (1.0 - sum).max(0.0);
                    let candidate_i = if direction > 0.0 {
                        (head[i] + step.min(headroom)).min(1.0)
                    } else {
                        (head[i] - step).max(0.0)
                    };
                    if (candidate_i - head[i]).abs() <= 1e-15 {
                        continue;
                    }
                    let mut candidate = head.to_vec();
                    candidate[i] = candidate_i;
                    let beta = WeightVector::new(candidate)?;
                    let sample = inner_minimize(problem, &beta, inner_grid)?;
                    if sample.e_star > best.e_star {
                        best = sample;
                        improved = true;
                    }
                }
            }
        }
        step /= 2.0;
    }
    Ok((best.beta.clone(), best))
}

/// Report of the degenerate single-objective limit.
#[derive(Debug, Clone)]
pub struct DegenerateReport {
    /// `E*(1) = min O_1`.
    pub e_star_at_one: f64,
    pub r_star_at_one: Vec<f64>,
    /// Whether the inner argmin stayed constant over lattice `beta_1 > 0`.
    pub r_star_independent: bool,
    /// Worst `|E*(beta)/beta_1 - E*(1)|` over lattice `beta_1 > 0`.
    pub max_ratio_deviation: f64,
    /// Worst coordinate deviation of `r*(beta)` from `r*(1)`.
    pub max_r_star_deviation: f64,
    pub samples: Vec<EStarSample>,
    pub warnings: Vec<String>,
}

/// Verifies the degenerate limit in which objectives `O_2..O_n` vanish:
/// `E*(beta) = beta_1 * min O_1` with a weight-independent inner argmin.
///
/// The premise is checked by sampling 1000 seeded points; any `|O_x| >
/// 1e-12` for `x > 1` is a [`ScalarizeError::PremiseViolation`].
pub fn degenerate_single_objective(
    problem: &ScalarizationProblem,
    beta_grid: usize,
    inner_grid: usize,
    seed: u64,
) -> Result<DegenerateReport, ScalarizeError> {
    if beta_grid < 2 {
        return Err(ScalarizeError::InvalidGrid);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let r: Vec<f64> = problem
            .domain
            .iter()
            .map(|iv| iv.lower + iv.width() * unit_closed_open(&mut rng))
            .collect();
        for (x, obj) in problem.objectives.iter().enumerate().skip(1) {
            let value = eval_with_r(obj, &problem.variables, &r)?;
            if value.abs() > 1e-12 {
                return Err(ScalarizeError::PremiseViolation {
                    objective: x + 1,
                    value,
                    at: r,
                });
            }
        }
    }

    let head_dims = problem.objectives.len() - 1;
    let mut one_head = vec![0.0; head_dims];
    one_head[0] = 1.0;
    let at_one = inner_minimize(problem, &WeightVector::new(one_head)?, inner_grid)?;

    let mut warnings = Vec::new();
    if at_one.e_star <= 0.0 {
        warnings.push(format!(
            "min O1 = {} is non-positive; the degenerate limit assumes O1 > 0",
            at_one.e_star
        ));
    }

    let curve = sample_estar_curve(problem, beta_grid, inner_grid)?;
    let mut max_ratio_deviation = 0.0f64;
    let mut max_r_star_deviation = 0.0f64;
    let mut excluded = 0usize;
    for sample in &curve.samples {
        let beta_1 = sample.beta.head()[0];
        if beta_1 <= 0.0 {
            excluded += 1;
            continue;
        }
        max_ratio_deviation =
            max_ratio_deviation.max((sample.e_star / beta_1 - at_one.e_star).abs());
        let deviation = sample
            .r_star
            .iter()
            .zip(&at_one.r_star)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        max_r_star_deviation = max_r_star_deviation.max(deviation);
    }
    if excluded > 0 {
        warnings.push(format!(
            "excluded {excluded} lattice point(s) with beta_1 = 0: the cost is identically zero there"
        ));
    }

    Ok(DegenerateReport {
        e_star_at_one: at_one.e_star,
        r_star_at_one: at_one.r_star,
        r_star_independent: max_r_star_deviation <= 1e-6,
        max_ratio_deviation,
        max_r_star_deviation,
        samples: curve.samples,
        warnings,
    })
}

#[cfg(test)]
mod tests;
