//! kkt-scope: multiplier sign analysis for nonlinear programs and
//! weighted-sum scalarization of multi-objective problems.
//!
//! The crate has two analysis tracks over a shared expression language:
//!
//! * [`kkt`] — at a query point of a box-domained program, build the
//!   case-specific Lagrangian, estimate the multipliers from stationarity by
//!   nonnegative least squares, classify their signs from the gradient-sign
//!   truth table, and decide whether the objective gradient lies in the cone
//!   of the signed active-constraint gradients. Planar problems export the
//!   picture behind the verdict as CSV rows.
//! * [`scalarize`] — collapse `n` objectives into the weighted cost
//!   `E(beta, r)`, sample the value function `E*(beta) = min_r E(beta, r)`,
//!   probe its curvature, evaluate envelope derivatives, maximize `E*` over
//!   the weight simplex, and verify the degenerate single-objective limit.
//!
//! [`expr`] provides parsing, evaluation, and symbolic differentiation of
//! the objective/constraint expressions; [`oracle`] holds the brute-force
//! grid references the test suites compare against; [`cli`] is the
//! `kkt-scope` binary's front end (problem files, subcommands, CSV).
//!
//! Everything is deterministic: fixed orderings, seeded sampling, and
//! 17-significant-digit output formatting make repeated runs byte-identical.
//!
//! ```
//! use kkt_scope::expr::parse_expression;
//! use kkt_scope::kkt::{analyze, Constraint, ConeVerdict, Problem, Sense};
//! use kkt_scope::domain::Interval;
//!
//! // max z subject to z <= 5, analyzed on the boundary.
//! let problem = Problem::new(
//!     Sense::Maximize,
//!     vec![("z".into(), Interval::new(-5.0, 5.0))],
//!     vec![parse_expression("z").unwrap()],
//!     vec![Constraint::leq_bound(parse_expression("z").unwrap(), 5.0)],
//! )
//! .unwrap();
//! let report = analyze(&problem, &[5.0], 1e-6).unwrap();
//! let objective = &report.objectives[0];
//! assert_eq!(objective.cone.verdict, ConeVerdict::Inside);
//! assert!((objective.estimate.multipliers[0].value - 1.0).abs() < 1e-12);
//! ```
//!
//! The `examples/` directory walks through each capability; see the README
//! for the CLI and problem-file formats.

pub mod cli;
pub mod domain;
pub mod expr;
pub mod kkt;
pub mod oracle;
pub mod scalarize;

pub use domain::Interval;
pub use expr::{parse_expression, ExprAst};
pub use kkt::{analyze, CaseTag, Constraint, Problem, Sense};
pub use scalarize::{ScalarizationProblem, WeightVector};
