//! Arithmetic expression trees: parsing, evaluation, and symbolic
//! differentiation.
//!
//! Objectives and constraints are closed-form expressions over named
//! variables. The grammar covers `+ - * / ^`, unary minus, and the function
//! set `sin cos exp log sqrt`. Exponents of `^` must fold to constants so
//! that differentiation stays closed-form; general `f^g` is written as
//! `exp(g*log(f))` by the caller when needed.
//!
//! Trees are immutable after construction and every operation here is a pure
//! function, so expressions can be shared freely across threads.

mod parser;

pub use parser::{parse_expression, ParseError};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// Unary operators: negation plus the supported function set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

/// Binary operators in the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Expression tree over named variables.
///
/// Invariants: variable names match `[A-Za-z_][A-Za-z0-9_]*`, and the
/// exponent subtree of `^` folds to a constant.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Constant(f64),
    Variable(String),
    Unary {
        op: UnaryOp,
        child: Box<ExprAst>,
    },
    Binary {
        op: BinaryOp,
        left: Box<ExprAst>,
        right: Box<ExprAst>,
    },
}

/// Errors raised while evaluating an expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("numeric domain error: {0}")]
    NumericDomain(String),
}

pub(crate) fn is_valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ExprAst {
    pub fn constant(value: f64) -> Self {
        ExprAst::Constant(value)
    }

    pub fn variable(name: impl Into<String>) -> Self {
        ExprAst::Variable(name.into())
    }

    /// Negation, folding literal children and double negations.
    pub fn neg(child: ExprAst) -> Self {
        match child {
            ExprAst::Constant(c) => ExprAst::Constant(-c),
            ExprAst::Unary {
                op: UnaryOp::Neg,
                child,
            } => *child,
            other => ExprAst::Unary {
                op: UnaryOp::Neg,
                child: Box::new(other),
            },
        }
    }

    /// Sum with constant folding and dropped zero terms.
    pub fn add(left: ExprAst, right: ExprAst) -> Self {
        match (left, right) {
            (ExprAst::Constant(a), ExprAst::Constant(b)) if (a + b).is_finite() => {
                ExprAst::Constant(a + b)
            }
            (ExprAst::Constant(z), r) if z == 0.0 => r,
            (l, ExprAst::Constant(z)) if z == 0.0 => l,
            (l, r) => ExprAst::Binary {
                op: BinaryOp::Add,
                left: Box::new(l),
                right: Box::new(r),
            },
        }
    }

    /// Difference with constant folding and dropped zero terms.
    pub fn sub(left: ExprAst, right: ExprAst) -> Self {
        match (left, right) {
            (ExprAst::Constant(a), ExprAst::Constant(b)) if (a - b).is_finite() => {
                ExprAst::Constant(a - b)
            }
            (l, ExprAst::Constant(z)) if z == 0.0 => l,
            (ExprAst::Constant(z), r) if z == 0.0 => Self::neg(r),
            (l, r) => ExprAst::Binary {
                op: BinaryOp::Sub,
                left: Box::new(l),
                right: Box::new(r),
            },
        }
    }

    /// Product with constant folding and unit/zero absorption.
    pub fn mul(left: ExprAst, right: ExprAst) -> Self {
        match (left, right) {
            (ExprAst::Constant(a), ExprAst::Constant(b)) if (a * b).is_finite() => {
                ExprAst::Constant(a * b)
            }
            (ExprAst::Constant(z), _) | (_, ExprAst::Constant(z)) if z == 0.0 => {
                ExprAst::Constant(0.0)
            }
            (ExprAst::Constant(o), r) if o == 1.0 => r,
            (l, ExprAst::Constant(o)) if o == 1.0 => l,
            (l, r) => ExprAst::Binary {
                op: BinaryOp::Mul,
                left: Box::new(l),
                right: Box::new(r),
            },
        }
    }

    /// Quotient; folds constant operands when the division is defined.
    pub fn div(left: ExprAst, right: ExprAst) -> Self {
        match (left, right) {
            (ExprAst::Constant(a), ExprAst::Constant(b)) if b != 0.0 && (a / b).is_finite() => {
                ExprAst::Constant(a / b)
            }
            (l, ExprAst::Constant(o)) if o == 1.0 => l,
            (l, r) => ExprAst::Binary {
                op: BinaryOp::Div,
                left: Box::new(l),
                right: Box::new(r),
            },
        }
    }

    /// Power; the exponent is expected to fold to a constant.
    pub fn pow(base: ExprAst, exponent: ExprAst) -> Self {
        match (base, exponent) {
            (ExprAst::Constant(a), ExprAst::Constant(b)) if a.powf(b).is_finite() => {
                ExprAst::Constant(a.powf(b))
            }
            (b, ExprAst::Constant(e)) if e == 1.0 => b,
            (_, ExprAst::Constant(e)) if e == 0.0 => ExprAst::Constant(1.0),
            (b, e) => ExprAst::Binary {
                op: BinaryOp::Pow,
                left: Box::new(b),
                right: Box::new(e),
            },
        }
    }

    /// Applies a unary operator, folding literal children when defined.
    pub fn apply(op: UnaryOp, child: ExprAst) -> Self {
        if op == UnaryOp::Neg {
            return Self::neg(child);
        }
        if let ExprAst::Constant(c) = child {
            let folded = match op {
                UnaryOp::Sin => Some(c.sin()),
                UnaryOp::Cos => Some(c.cos()),
                UnaryOp::Exp => Some(c.exp()),
                UnaryOp::Log if c > 0.0 => Some(c.ln()),
                UnaryOp::Sqrt if c >= 0.0 => Some(c.sqrt()),
                _ => None,
            };
            if let Some(v) = folded {
                if v.is_finite() {
                    return ExprAst::Constant(v);
                }
            }
            return ExprAst::Unary {
                op,
                child: Box::new(ExprAst::Constant(c)),
            };
        }
        ExprAst::Unary {
            op,
            child: Box::new(child),
        }
    }

    /// Set of variable names referenced by the tree, in sorted order.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            ExprAst::Constant(_) => {}
            ExprAst::Variable(name) => {
                out.insert(name.clone());
            }
            ExprAst::Unary { child, .. } => child.collect_variables(out),
            ExprAst::Binary { left, right, .. } => {
                left.collect_variables(out);
                right.collect_variables(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ExprAst::Constant(c) if c.is_sign_negative() => 3,
            ExprAst::Constant(_) | ExprAst::Variable(_) => 5,
            ExprAst::Unary { op: UnaryOp::Neg, .. } => 3,
            ExprAst::Unary { .. } => 5,
            ExprAst::Binary { op, .. } => match op {
                BinaryOp::Add | BinaryOp::Sub => 1,
                BinaryOp::Mul | BinaryOp::Div => 2,
                BinaryOp::Pow => 4,
            },
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min_prec;
        if parens {
            write!(f, "(")?;
        }
        match self {
            ExprAst::Constant(c) => write!(f, "{c}")?,
            ExprAst::Variable(name) => write!(f, "{name}")?,
            ExprAst::Unary { op: UnaryOp::Neg, child } => {
                write!(f, "-")?;
                child.fmt_prec(f, 3)?;
            }
            ExprAst::Unary { op, child } => {
                write!(f, "{}(", op.name())?;
                child.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
            ExprAst::Binary { op, left, right } => {
                let (symbol, left_min, right_min) = match op {
                    BinaryOp::Add => ("+", 1, 2),
                    BinaryOp::Sub => ("-", 1, 2),
                    BinaryOp::Mul => ("*", 2, 3),
                    BinaryOp::Div => ("/", 2, 3),
                    // Left operand of `^` must be an atom; a signed constant
                    // exponent may stay bare (`z^-2` reparses identically).
                    BinaryOp::Pow => ("^", 5, 3),
                };
                left.fmt_prec(f, left_min)?;
                write!(f, "{symbol}")?;
                right.fmt_prec(f, right_min)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Folds a variable-free subtree to its numeric value; `None` when the tree
/// references variables or the arithmetic is undefined/non-finite.
pub fn const_fold(ast: &ExprAst) -> Option<f64> {
    let value = match ast {
        ExprAst::Constant(c) => *c,
        ExprAst::Variable(_) => return None,
        ExprAst::Unary { op, child } => {
            let c = const_fold(child)?;
            match op {
                UnaryOp::Neg => -c,
                UnaryOp::Sin => c.sin(),
                UnaryOp::Cos => c.cos(),
                UnaryOp::Exp => c.exp(),
                UnaryOp::Log => {
                    if c <= 0.0 {
                        return None;
                    }
                    c.ln()
                }
                UnaryOp::Sqrt => {
                    if c < 0.0 {
                        return None;
                    }
                    c.sqrt()
                }
            }
        }
        ExprAst::Binary { op, left, right } => {
            let l = const_fold(left)?;
            let r = const_fold(right)?;
            match op {
                BinaryOp::Add => l + r,
                BinaryOp::Sub => l - r,
                BinaryOp::Mul => l * r,
                BinaryOp::Div => {
                    if r == 0.0 {
                        return None;
                    }
                    l / r
                }
                BinaryOp::Pow => l.powf(r),
            }
        }
    };
    value.is_finite().then_some(value)
}

fn eval_inner(
    ast: &ExprAst,
    resolve: &mut impl FnMut(&str) -> Option<f64>,
) -> Result<f64, EvalError> {
    let value = match ast {
        ExprAst::Constant(c) => *c,
        ExprAst::Variable(name) => resolve(name)
            .ok_or_else(|| EvalError::UnboundVariable(name.clone()))?,
        ExprAst::Unary { op, child } => {
            let c = eval_inner(child, resolve)?;
            match op {
                UnaryOp::Neg => -c,
                UnaryOp::Sin => c.sin(),
                UnaryOp::Cos => c.cos(),
                UnaryOp::Exp => c.exp(),
                UnaryOp::Log => {
                    if c <= 0.0 {
                        return Err(EvalError::NumericDomain(format!(
                            "log of non-positive argument {c}"
                        )));
                    }
                    c.ln()
                }
                UnaryOp::Sqrt => {
                    if c < 0.0 {
                        return Err(EvalError::NumericDomain(format!(
                            "sqrt of negative argument {c}"
                        )));
                    }
                    c.sqrt()
                }
            }
        }
        ExprAst::Binary { op, left, right } => {
            let l = eval_inner(left, resolve)?;
            let r = eval_inner(right, resolve)?;
            match op {
                BinaryOp::Add => l + r,
                BinaryOp::Sub => l - r,
                BinaryOp::Mul => l * r,
                BinaryOp::Div => {
                    if r == 0.0 {
                        return Err(EvalError::NumericDomain("division by zero".into()));
                    }
                    l / r
                }
                BinaryOp::Pow => l.powf(r),
            }
        }
    };
    if !value.is_finite() {
        return Err(EvalError::NumericDomain("non-finite result".into()));
    }
    Ok(value)
}

/// Evaluates `ast` with the given variable binding.
pub fn evaluate(ast: &ExprAst, binding: &HashMap<String, f64>) -> Result<f64, EvalError> {
    eval_inner(ast, &mut |name| binding.get(name).copied())
}

/// Evaluates `ast` against positionally bound variables. `vars` and `point`
/// must have equal length; this is the allocation-free path used by the grid
/// scans.
pub fn evaluate_at(ast: &ExprAst, vars: &[String], point: &[f64]) -> Result<f64, EvalError> {
    debug_assert_eq!(vars.len(), point.len());
    eval_inner(ast, &mut |name| {
        vars.iter().position(|v| v == name).map(|i| point[i])
    })
}

/// Exact symbolic derivative of `ast` with respect to `var`.
///
/// Subtrees not containing `var` differentiate to the constant 0. The result
/// is constant-folded but otherwise unsimplified.
///
/// Panics if a `^` exponent does not fold to a constant (a violation of the
/// tree invariant; `parse_expression` never produces such a tree).
pub fn differentiate(ast: &ExprAst, var: &str) -> ExprAst {
    match ast {
        ExprAst::Constant(_) => ExprAst::constant(0.0),
        ExprAst::Variable(name) => {
            ExprAst::constant(if name == var { 1.0 } else { 0.0 })
        }
        ExprAst::Unary { op, child } => {
            let dc = differentiate(child, var);
            let inner = (**child).clone();
            match op {
                UnaryOp::Neg => ExprAst::neg(dc),
                UnaryOp::Sin => ExprAst::mul(ExprAst::apply(UnaryOp::Cos, inner), dc),
                UnaryOp::Cos => {
                    ExprAst::neg(ExprAst::mul(ExprAst::apply(UnaryOp::Sin, inner), dc))
                }
                UnaryOp::Exp => ExprAst::mul(ExprAst::apply(UnaryOp::Exp, inner), dc),
                UnaryOp::Log => ExprAst::div(dc, inner),
                UnaryOp::Sqrt => ExprAst::div(
                    dc,
                    ExprAst::mul(ExprAst::constant(2.0), ExprAst::apply(UnaryOp::Sqrt, inner)),
                ),
            }
        }
        ExprAst::Binary { op, left, right } => match op {
            BinaryOp::Add => ExprAst::add(differentiate(left, var), differentiate(right, var)),
            BinaryOp::Sub => ExprAst::sub(differentiate(left, var), differentiate(right, var)),
            BinaryOp::Mul => ExprAst::add(
                ExprAst::mul(differentiate(left, var), (**right).clone()),
                ExprAst::mul((**left).clone(), differentiate(right, var)),
            ),
            BinaryOp::Div => ExprAst::div(
                ExprAst::sub(
                    ExprAst::mul(differentiate(left, var), (**right).clone()),
                    ExprAst::mul((**left).clone(), differentiate(right, var)),
                ),
                ExprAst::pow((**right).clone(), ExprAst::constant(2.0)),
            ),
            BinaryOp::Pow => {
                let exponent = const_fold(right)
                    .expect("`^` exponent must fold to a constant");
                ExprAst::mul(
                    ExprAst::mul(
                        ExprAst::constant(exponent),
                        ExprAst::pow((**left).clone(), ExprAst::constant(exponent - 1.0)),
                    ),
                    differentiate(left, var),
                )
            }
        },
    }
}

/// Gradient of `ast` at `point`, one entry per name in `vars`.
pub fn gradient(ast: &ExprAst, vars: &[String], point: &[f64]) -> Result<Vec<f64>, EvalError> {
    assert_eq!(
        vars.len(),
        point.len(),
        "gradient needs one coordinate per variable"
    );
    vars.iter()
        .map(|v| evaluate_at(&differentiate(ast, v), vars, point))
        .collect()
}

#[cfg(test)]
mod tests;
