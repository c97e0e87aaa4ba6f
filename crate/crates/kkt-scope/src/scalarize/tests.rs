use super::*;
use crate::expr::parse_expression;
use crate::oracle::{self, OracleConfig};

fn iv(lower: f64, upper: f64) -> Interval {
    Interval::new(lower, upper)
}

fn e(text: &str) -> ExprAst {
    parse_expression(text).unwrap()
}

/// O1 = (r-1)^2, O2 = (r-3)^2 on [0, 5]. Analytically
/// E*(beta) = 4 * beta * (1 - beta) with argmin r* = 3 - 2 * beta.
fn quadratic_pair() -> ScalarizationProblem {
    ScalarizationProblem::new(
        vec![("r".into(), iv(0.0, 5.0))],
        vec![e("(r - 1)^2"), e("(r - 3)^2")],
        false,
    )
    .unwrap()
}

/// O1 = (r-2)^2 + 1, O2 = 0 on [0, 5]: the degenerate single-objective
/// limit with E*(beta) = beta_1.
fn degenerate_pair() -> ScalarizationProblem {
    ScalarizationProblem::new(
        vec![("r".into(), iv(0.0, 5.0))],
        vec![e("(r - 2)^2 + 1"), e("0")],
        false,
    )
    .unwrap()
}

fn beta1(b: f64) -> WeightVector {
    WeightVector::new(vec![b]).unwrap()
}

#[test]
fn cost_is_the_weighted_average() {
    // Constant objectives O1 = 4 and O2 = 2 at beta = 0.5 average to 3.
    let problem = ScalarizationProblem::new(
        vec![("r".into(), iv(0.0, 1.0))],
        vec![e("4"), e("2")],
        false,
    )
    .unwrap();
    assert_eq!(cost(&problem, &beta1(0.5), &[0.5]).unwrap(), 3.0);
    // Zero weight collapses to the trailing objective exactly.
    assert_eq!(cost(&problem, &beta1(0.0), &[0.5]).unwrap(), 2.0);
}

#[test]
fn weights_outside_the_simplex_are_rejected() {
    assert!(matches!(
        WeightVector::new(vec![1.2]),
        Err(ScalarizeError::SimplexViolation(_))
    ));
    assert!(matches!(
        WeightVector::new(vec![-0.1]),
        Err(ScalarizeError::SimplexViolation(_))
    ));
    assert!(matches!(
        WeightVector::new(vec![0.7, 0.7]),
        Err(ScalarizeError::SimplexViolation(_))
    ));
}

#[test]
fn derived_trailing_weight() {
    let beta = WeightVector::new(vec![0.25, 0.5]).unwrap();
    assert!((beta.last() - 0.25).abs() < 1e-15);
    assert_eq!(beta.full().len(), 3);
}

#[test]
fn cost_is_affine_in_the_weights() {
    let problem = quadratic_pair();
    let mut state = 3u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / (1u64 << 53) as f64
    };
    for _ in 0..100 {
        let a = beta1(next());
        let b = beta1(next());
        let alpha = next();
        let r = [5.0 * next()];
        let mixed = WeightVector::combine(&a, &b, alpha).unwrap();
        let lhs = cost(&problem, &mixed, &r).unwrap();
        let rhs = alpha * cost(&problem, &a, &r).unwrap()
            + (1.0 - alpha) * cost(&problem, &b, &r).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }
}

#[test]
fn inner_minimize_hits_the_quadratic_vertex() {
    let problem = quadratic_pair();
    let sample = inner_minimize(&problem, &beta1(1.0), 64).unwrap();
    assert!((sample.r_star[0] - 1.0).abs() < 1e-6);
    assert!(sample.e_star.abs() < 1e-12);

    let sample = inner_minimize(&problem, &beta1(0.5), 64).unwrap();
    assert!((sample.r_star[0] - 2.0).abs() < 1e-6);
    assert!((sample.e_star - 1.0).abs() < 1e-9);
    assert!(sample.inner_residual < 1e-8);
}

#[test]
fn inner_minimize_matches_the_grid_oracle() {
    let problem = quadratic_pair();
    let config = OracleConfig { grid_points: 10_000, ..OracleConfig::default() };
    for k in 0..=10 {
        let beta = beta1(k as f64 / 10.0);
        let sample = inner_minimize(&problem, &beta, 64).unwrap();
        // Brute-force the same weighted cost through an explicit expression.
        let weighted = ExprAst::add(
            ExprAst::mul(ExprAst::constant(beta.head()[0]), problem.objectives()[0].clone()),
            ExprAst::mul(ExprAst::constant(beta.last()), problem.objectives()[1].clone()),
        );
        let (_, oracle_min) = oracle::brute_force_min(
            &weighted,
            problem.variables(),
            problem.domain(),
            &config,
        )
        .unwrap();
        assert!(
            (sample.e_star - oracle_min).abs() <= 1e-6,
            "beta {}: {} vs oracle {}",
            beta.head()[0],
            sample.e_star,
            oracle_min
        );
    }
}

#[test]
fn inner_minimize_breaks_plateau_ties_lexicographically() {
    let problem = ScalarizationProblem::new(
        vec![("r".into(), iv(0.0, 5.0))],
        vec![e("7"), e("7")],
        false,
    )
    .unwrap();
    let sample = inner_minimize(&problem, &beta1(0.5), 16).unwrap();
    assert_eq!(sample.r_star, vec![0.0]);
    assert_eq!(sample.e_star, 7.0);
}

#[test]
fn inner_minimize_rejects_degenerate_grid() {
    assert!(matches!(
        inner_minimize(&quadratic_pair(), &beta1(0.5), 1),
        Err(ScalarizeError::InvalidGrid)
    ));
}

#[test]
fn curve_lattice_counts() {
    let problem = quadratic_pair();
    let curve = sample_estar_curve(&problem, 4, 64).unwrap();
    assert_eq!(curve.samples.len(), 5);
    let betas: Vec<f64> = curve.samples.iter().map(|s| s.beta.head()[0]).collect();
    assert_eq!(betas, vec![0.0, 0.25, 0.5, 0.75, 1.0]);

    // Two head dimensions: triangular lattice.
    assert_eq!(WeightVector::lattice(2, 2).len(), 6);
}

#[test]
fn curve_matches_the_analytic_value_function() {
    // E*(beta) = 4 * beta * (1 - beta) for the quadratic pair.
    let curve = sample_estar_curve(&quadratic_pair(), 4, 256).unwrap();
    for sample in &curve.samples {
        let b = sample.beta.head()[0];
        let expected = 4.0 * b * (1.0 - b);
        assert!(
            (sample.e_star - expected).abs() <= 1e-6,
            "beta {b}: {} vs {expected}",
            sample.e_star
        );
    }
}

#[test]
fn curvature_of_a_linear_value_function_is_flat() {
    // O2 = 0 and O1 constant: E*(beta) = beta * min O1 is linear, so both
    // inequality directions hold with zero slack.
    let problem = ScalarizationProblem::new(
        vec![("r".into(), iv(0.0, 5.0))],
        vec![e("2"), e("0")],
        false,
    )
    .unwrap();
    let probe = check_estar_curvature(&problem, 50, 3, 64).unwrap();
    assert_eq!(probe.convex_direction_holds(), 50);
    assert_eq!(probe.concave_direction_holds(), 50);
    let counts = probe.sign_counts();
    assert_eq!(counts.zero, 50);
}

#[test]
fn curvature_of_the_quadratic_pair_is_concave() {
    let probe = check_estar_curvature(&quadratic_pair(), 100, 7, 256).unwrap();
    assert_eq!(probe.trials.len(), 100);
    for t in &probe.trials {
        assert!(
            t.slack_reverse >= -1e-9,
            "concavity violated: slack_reverse = {}",
            t.slack_reverse
        );
    }
}

#[test]
fn curvature_rejects_zero_trials() {
    assert!(matches!(
        check_estar_curvature(&quadratic_pair(), 0, 7, 64),
        Err(ScalarizeError::InvalidTrials)
    ));
}

#[test]
fn envelope_derivative_at_inner_minimizers() {
    let problem = quadratic_pair();

    // beta = 0.5: r* = 2 and O1(2) - O2(2) = 1 - 1 = 0.
    let beta = beta1(0.5);
    let sample = inner_minimize(&problem, &beta, 256).unwrap();
    let d = envelope_derivative(&problem, &beta, &sample).unwrap();
    assert!(d[0].abs() < 1e-6);

    // beta = 1: r* = 1 and O1(1) - O2(1) = 0 - 4 = -4.
    let beta = beta1(1.0);
    let sample = inner_minimize(&problem, &beta, 256).unwrap();
    let d = envelope_derivative(&problem, &beta, &sample).unwrap();
    assert!((d[0] + 4.0).abs() < 1e-6);
}

#[test]
fn envelope_derivative_matches_value_function_differences() {
    let problem = quadratic_pair();
    let h = 1e-4;
    for k in 1..=9 {
        let b = k as f64 / 10.0;
        let beta = beta1(b);
        let sample = inner_minimize(&problem, &beta, 256).unwrap();
        let d = envelope_derivative(&problem, &beta, &sample).unwrap()[0];
        let up = inner_minimize(&problem, &beta1(b + h), 256).unwrap().e_star;
        let down = inner_minimize(&problem, &beta1(b - h), 256).unwrap().e_star;
        let fd = (up - down) / (2.0 * h);
        assert!((d - fd).abs() <= 1e-3, "beta {b}: envelope {d} vs difference {fd}");
    }
}

#[test]
fn outer_maximize_finds_the_analytic_saddle() {
    // O1 = (r-1)^2 + 1, O2 = (r-3)^2 + 2: E*(beta) = -4 beta^2 + 3 beta + 2
    // with the maximum at beta = 3/8.
    let problem = ScalarizationProblem::new(
        vec![("r".into(), iv(0.0, 5.0))],
        vec![e("(r - 1)^2 + 1"), e("(r - 3)^2 + 2")],
        false,
    )
    .unwrap();
    let (beta, sample) = outer_maximize_beta(&problem, 16, 512).unwrap();
    assert!((beta.head()[0] - 0.375).abs() < 1e-3);
    assert!((sample.e_star - 2.5625).abs() < 1e-6);

    let config = OracleConfig { grid_points: 1000, ..OracleConfig::default() };
    let saddle = oracle::brute_force_saddle(&problem, &config).unwrap();
    assert!((beta.head()[0] - saddle.beta.head()[0]).abs() <= 1e-3);
}

#[test]
fn outer_maximize_prefers_full_weight_on_an_increasing_value_function() {
    let (beta, sample) = outer_maximize_beta(&degenerate_pair(), 16, 256).unwrap();
    assert!((beta.head()[0] - 1.0).abs() < 1e-9);
    assert!((sample.e_star - 1.0).abs() < 1e-9);
}

#[test]
fn outer_maximize_breaks_constant_ties_to_zero() {
    let problem = ScalarizationProblem::new(
        vec![("r".into(), iv(0.0, 5.0))],
        vec![e("(r - 2)^2"), e("(r - 2)^2")],
        false,
    )
    .unwrap();
    let (beta, _) = outer_maximize_beta(&problem, 8, 128).unwrap();
    assert_eq!(beta.head(), &[0.0]);
}

#[test]
fn outer_maximize_dominates_every_lattice_sample() {
    let problem = quadratic_pair();
    let curve = sample_estar_curve(&problem, 16, 256).unwrap();
    let (_, best) = outer_maximize_beta(&problem, 16, 256).unwrap();
    for sample in &curve.samples {
        assert!(best.e_star >= sample.e_star);
    }
}

#[test]
fn degenerate_limit_is_linear_with_constant_argmin() {
    let report = degenerate_single_objective(&degenerate_pair(), 16, 256, 0).unwrap();
    assert!((report.e_star_at_one - 1.0).abs() < 1e-8);
    assert!((report.r_star_at_one[0] - 2.0).abs() < 1e-6);
    assert!(report.r_star_independent);
    assert!(report.max_ratio_deviation <= 1e-8);
    // The beta_1 = 0 lattice point is excluded and flagged.
    assert!(report.warnings.iter().any(|w| w.contains("beta_1 = 0")));
}

#[test]
fn degenerate_limit_warns_on_non_positive_objective() {
    let problem = ScalarizationProblem::new(
        vec![("r".into(), iv(0.0, 5.0))],
        vec![e("(r - 2)^2"), e("0")],
        false,
    )
    .unwrap();
    let report = degenerate_single_objective(&problem, 8, 256, 0).unwrap();
    assert!(report.e_star_at_one.abs() < 1e-9);
    assert!(report.warnings.iter().any(|w| w.contains("min O1")));
}

#[test]
fn degenerate_limit_rejects_non_zero_secondary_objectives() {
    let err = degenerate_single_objective(&quadratic_pair(), 8, 64, 0).unwrap_err();
    assert!(matches!(err, ScalarizeError::PremiseViolation { objective: 2, .. }));
}

#[test]
fn value_function_lower_bounds_every_cost_sample() {
    let problem = quadratic_pair();
    let curve = sample_estar_curve(&problem, 8, 256).unwrap();
    for sample in &curve.samples {
        for k in 0..=20 {
            let r = [5.0 * k as f64 / 20.0];
            let c = cost(&problem, &sample.beta, &r).unwrap();
            assert!(sample.e_star <= c + 1e-9);
        }
    }
}

#[test]
fn positivity_warnings_flag_non_positive_objectives() {
    let problem = ScalarizationProblem::new(
        vec![("r".into(), iv(0.0, 5.0))],
        vec![e("r - 2"), e("r + 1")],
        true,
    )
    .unwrap();
    let warnings = problem.positivity_warnings(0, 200);
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].contains("O1"));

    let silenced = ScalarizationProblem::new(
        vec![("r".into(), iv(0.0, 5.0))],
        vec![e("r - 2"), e("r + 1")],
        false,
    )
    .unwrap();
    assert!(silenced.positivity_warnings(0, 200).is_empty());
}
