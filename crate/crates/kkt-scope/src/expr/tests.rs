use super::*;
use crate::oracle;
use proptest::prelude::*;

fn bind(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn var(name: &str) -> ExprAst {
    ExprAst::variable(name)
}

#[test]
fn parse_quadratic_shape() {
    let ast = parse_expression("z^2 + 3*z").unwrap();
    let expected = ExprAst::Binary {
        op: BinaryOp::Add,
        left: Box::new(ExprAst::Binary {
            op: BinaryOp::Pow,
            left: Box::new(var("z")),
            right: Box::new(ExprAst::Constant(2.0)),
        }),
        right: Box::new(ExprAst::Binary {
            op: BinaryOp::Mul,
            left: Box::new(ExprAst::Constant(3.0)),
            right: Box::new(var("z")),
        }),
    };
    assert_eq!(ast, expected);
}

#[test]
fn parse_function_call_shape() {
    let ast = parse_expression("log(z1) - z2").unwrap();
    let expected = ExprAst::Binary {
        op: BinaryOp::Sub,
        left: Box::new(ExprAst::Unary {
            op: UnaryOp::Log,
            child: Box::new(var("z1")),
        }),
        right: Box::new(var("z2")),
    };
    assert_eq!(ast, expected);
}

#[test]
fn parse_reports_offset_of_bad_operand() {
    let err = parse_expression("2*+z").unwrap_err();
    assert_eq!(err.offset(), 2);
    assert!(matches!(err, ParseError::Syntax { .. }));
}

#[test]
fn parse_rejects_unknown_function() {
    let err = parse_expression("tan(z)").unwrap_err();
    assert_eq!(err.offset(), 0);
}

#[test]
fn parse_rejects_trailing_input() {
    let err = parse_expression("z z").unwrap_err();
    assert_eq!(err.offset(), 2);
}

#[test]
fn parse_rejects_variable_exponent() {
    let err = parse_expression("z^z").unwrap_err();
    assert_eq!(err, ParseError::NonConstantExponent { offset: 2 });
}

#[test]
fn parse_folds_constant_exponent_subtree() {
    let ast = parse_expression("z^(1+1)").unwrap();
    let expected = ExprAst::Binary {
        op: BinaryOp::Pow,
        left: Box::new(var("z")),
        right: Box::new(ExprAst::Constant(2.0)),
    };
    assert_eq!(ast, expected);
}

#[test]
fn parse_allows_signed_exponent() {
    let ast = parse_expression("z^-2").unwrap();
    assert_eq!(evaluate(&ast, &bind(&[("z", 2.0)])).unwrap(), 0.25);
}

#[test]
fn power_is_right_associative() {
    let ast = parse_expression("2^2^3").unwrap();
    // 2^(2^3) = 256, not (2^2)^3 = 64.
    assert_eq!(evaluate(&ast, &bind(&[])).unwrap(), 256.0);
}

#[test]
fn unary_minus_binds_looser_than_power() {
    let ast = parse_expression("-z^2").unwrap();
    assert_eq!(evaluate(&ast, &bind(&[("z", 3.0)])).unwrap(), -9.0);
}

#[test]
fn evaluate_quadratic() {
    let ast = parse_expression("z^2+3*z").unwrap();
    assert_eq!(evaluate(&ast, &bind(&[("z", 2.0)])).unwrap(), 10.0);
}

#[test]
fn evaluate_log_domain_error() {
    let ast = parse_expression("log(z)").unwrap();
    let err = evaluate(&ast, &bind(&[("z", 0.0)])).unwrap_err();
    assert!(matches!(err, EvalError::NumericDomain(_)));
}

#[test]
fn evaluate_missing_binding() {
    let ast = parse_expression("z1*z2").unwrap();
    let err = evaluate(&ast, &bind(&[("z1", 3.0)])).unwrap_err();
    assert_eq!(err, EvalError::UnboundVariable("z2".into()));
}

#[test]
fn evaluate_division_by_zero() {
    let ast = parse_expression("1/z").unwrap();
    let err = evaluate(&ast, &bind(&[("z", 0.0)])).unwrap_err();
    assert!(matches!(err, EvalError::NumericDomain(_)));
}

#[test]
fn evaluate_rejects_overflow() {
    let ast = parse_expression("exp(z)").unwrap();
    let err = evaluate(&ast, &bind(&[("z", 1.0e4)])).unwrap_err();
    assert!(matches!(err, EvalError::NumericDomain(_)));
}

#[test]
fn differentiate_power_rule() {
    let ast = parse_expression("z^2").unwrap();
    let d = differentiate(&ast, "z");
    assert_eq!(d.to_string(), "2*z");
    assert_eq!(evaluate(&d, &bind(&[("z", 3.0)])).unwrap(), 6.0);
}

#[test]
fn differentiate_independent_factor() {
    let ast = parse_expression("z1*z2").unwrap();
    assert_eq!(differentiate(&ast, "z1"), var("z2"));
}

#[test]
fn differentiate_log() {
    let ast = parse_expression("log(z)").unwrap();
    assert_eq!(differentiate(&ast, "z").to_string(), "1/z");
}

#[test]
fn differentiate_chain_rule_through_functions() {
    let ast = parse_expression("sin(z^2)").unwrap();
    let d = differentiate(&ast, "z");
    let z = 0.7f64;
    let expected = (z * z).cos() * 2.0 * z;
    let got = evaluate(&d, &bind(&[("z", z)])).unwrap();
    assert!((got - expected).abs() < 1e-12);
}

#[test]
fn gradient_of_sum_of_squares() {
    let ast = parse_expression("z1^2+z2^2").unwrap();
    let vars = vec!["z1".to_string(), "z2".to_string()];
    let grad = gradient(&ast, &vars, &[1.0, 2.0]).unwrap();
    assert_eq!(grad, vec![2.0, 4.0]);
}

#[test]
fn gradient_of_constant_is_zero() {
    let ast = parse_expression("5").unwrap();
    let vars = vec!["z1".to_string(), "z2".to_string()];
    assert_eq!(gradient(&ast, &vars, &[0.3, -1.2]).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn gradient_matches_central_differences_on_polynomials() {
    let vars = vec!["z1".to_string(), "z2".to_string()];
    let corpus = [
        "z1^3 - 2*z1*z2 + z2^2",
        "0.5*z1^4 + z1*z2 - 3*z2",
        "(z1 - 1)^2 * (z2 + 2)^2",
        "z1^2*z2 - z2^3 + 4",
    ];
    let points = [[0.4, -0.8], [1.3, 0.9], [-1.1, 2.0], [2.0, -0.5]];
    for text in corpus {
        let ast = parse_expression(text).unwrap();
        for point in &points {
            let sym = gradient(&ast, &vars, point).unwrap();
            let fd = oracle::finite_difference_gradient(&ast, &vars, point, 1e-5).unwrap();
            for (s, f) in sym.iter().zip(&fd) {
                assert!(
                    (s - f).abs() <= 1e-6 * (1.0 + s.abs()),
                    "{text} at {point:?}: symbolic {s} vs finite difference {f}"
                );
            }
        }
    }
}

#[test]
fn differentiation_is_linear() {
    let f = parse_expression("z^3 + sin(z)").unwrap();
    let g = parse_expression("exp(z/4) - z^2").unwrap();
    let a = 2.5;
    let combined = ExprAst::add(ExprAst::mul(ExprAst::constant(a), f.clone()), g.clone());
    let d_combined = differentiate(&combined, "z");
    let df = differentiate(&f, "z");
    let dg = differentiate(&g, "z");
    for i in 0..100 {
        let z = -2.0 + 4.0 * (i as f64) / 99.0;
        let binding = bind(&[("z", z)]);
        let lhs = evaluate(&d_combined, &binding).unwrap();
        let rhs = a * evaluate(&df, &binding).unwrap() + evaluate(&dg, &binding).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }
}

// Random trees built through the smart constructors; these maintain the
// constant-exponent invariant the printer and parser rely on.
fn arb_expr() -> impl Strategy<Value = ExprAst> {
    let leaf = prop_oneof![
        (-4.0f64..4.0).prop_map(ExprAst::constant),
        prop_oneof![Just("z1"), Just("z2"), Just("w")].prop_map(ExprAst::variable),
    ];
    leaf.prop_recursive(4, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::div(a, b)),
            (inner.clone(), -3i32..4).prop_map(|(a, e)| ExprAst::pow(a, ExprAst::constant(e as f64))),
            inner.clone().prop_map(ExprAst::neg),
            inner.clone().prop_map(|a| ExprAst::apply(UnaryOp::Sin, a)),
            inner.clone().prop_map(|a| ExprAst::apply(UnaryOp::Cos, a)),
            inner.prop_map(|a| ExprAst::apply(UnaryOp::Exp, a)),
        ]
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(ast in arb_expr()) {
        let printed = ast.to_string();
        let reparsed = parse_expression(&printed)
            .unwrap_or_else(|e| panic!("failed to reparse `{printed}`: {e}"));
        prop_assert_eq!(reparsed, ast);
    }

    #[test]
    fn symbolic_gradient_matches_finite_differences(
        ast in arb_expr(),
        z1 in -1.5f64..1.5,
        z2 in -1.5f64..1.5,
        w in -1.5f64..1.5,
    ) {
        let vars = vec!["z1".to_string(), "z2".to_string(), "w".to_string()];
        let point = [z1, z2, w];
        // Skip trees that are not evaluable near the point (domain holes).
        if let Ok(sym) = gradient(&ast, &vars, &point) {
            let coarse = oracle::finite_difference_gradient(&ast, &vars, &point, 1e-5);
            let fine = oracle::finite_difference_gradient(&ast, &vars, &point, 5e-6);
            if let (Ok(coarse), Ok(fine)) = (coarse, fine) {
                for ((s, c), f) in sym.iter().zip(&coarse).zip(&fine) {
                    // Central differences carry O(h^2 * f''') truncation
                    // error; compare only where halving h shows the
                    // difference quotient has converged.
                    if (c - f).abs() > 1e-6 * (1.0 + f.abs()) {
                        continue;
                    }
                    prop_assert!(
                        (s - f).abs() <= 1e-4 * (1.0 + s.abs().max(f.abs())),
                        "symbolic {} vs finite difference {}", s, f
                    );
                }
            }
        }
    }
}
