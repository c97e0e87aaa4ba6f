//! Recursive-descent parser for the expression grammar.
//!
//! Precedence, tightest first: `^`, unary `-`, `*` `/`, `+` `-`. `^` is
//! right-associative, everything else left-associative. Function calls are
//! `sin(..) cos(..) exp(..) log(..) sqrt(..)`.

use super::{const_fold, BinaryOp, ExprAst, UnaryOp};
use thiserror::Error;

/// Parse failures, with 0-based character offsets into the input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("exponent at offset {offset} does not fold to a constant")]
    NonConstantExponent { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } => *offset,
            ParseError::NonConstantExponent { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let offset = i;
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
            }
            '+' => {
                tokens.push(Spanned { tok: Tok::Plus, offset });
                i += 1;
            }
            '-' => {
                tokens.push(Spanned { tok: Tok::Minus, offset });
                i += 1;
            }
            '*' => {
                tokens.push(Spanned { tok: Tok::Star, offset });
                i += 1;
            }
            '/' => {
                tokens.push(Spanned { tok: Tok::Slash, offset });
                i += 1;
            }
            '^' => {
                tokens.push(Spanned { tok: Tok::Caret, offset });
                i += 1;
            }
            '(' => {
                tokens.push(Spanned { tok: Tok::LParen, offset });
                i += 1;
            }
            ')' => {
                tokens.push(Spanned { tok: Tok::RParen, offset });
                i += 1;
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let literal: String = chars[start..i].iter().collect();
                let value: f64 = literal.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: "a valid number literal".into(),
                })?;
                if !value.is_finite() {
                    return Err(ParseError::Syntax {
                        offset: start,
                        expected: "a finite number literal".into(),
                    });
                }
                tokens.push(Spanned { tok: Tok::Num(value), offset: start });
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                tokens.push(Spanned { tok: Tok::Ident(name), offset: start });
            }
            other => {
                return Err(ParseError::Syntax {
                    offset,
                    expected: format!("a token, found unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end_offset: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|s| s.offset)
            .unwrap_or(self.end_offset)
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset: self.offset(),
                expected: expected.into(),
            })
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinaryOp::Add,
                Some(Tok::Minus) => BinaryOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = ExprAst::Binary {
                op,
                left: Box::new(lhs),
                right: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinaryOp::Mul,
                Some(Tok::Slash) => BinaryOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = ExprAst::Binary {
                op,
                left: Box::new(lhs),
                right: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ExprAst, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let child = self.unary()?;
            // A negated literal becomes a negative constant, so printed
            // expressions like `-3*z` reparse to the identical tree.
            return Ok(match child {
                ExprAst::Constant(c) => ExprAst::Constant(-c),
                other => ExprAst::Unary {
                    op: UnaryOp::Neg,
                    child: Box::new(other),
                },
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let exp_offset = self.offset();
            let exponent = self.unary()?;
            let folded = const_fold(&exponent)
                .ok_or(ParseError::NonConstantExponent { offset: exp_offset })?;
            return Ok(ExprAst::Binary {
                op: BinaryOp::Pow,
                left: Box::new(base),
                right: Box::new(ExprAst::Constant(folded)),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        let offset = self.offset();
        match self.bump().map(|s| s.tok) {
            Some(Tok::Num(v)) => Ok(ExprAst::Constant(v)),
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    let op = match name.as_str() {
                        "sin" => UnaryOp::Sin,
                        "cos" => UnaryOp::Cos,
                        "exp" => UnaryOp::Exp,
                        "log" => UnaryOp::Log,
                        "sqrt" => UnaryOp::Sqrt,
                        _ => {
                            return Err(ParseError::Syntax {
                                offset,
                                expected: "a known function (sin, cos, exp, log, sqrt)".into(),
                            })
                        }
                    };
                    self.pos += 1; // consume `(`
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)` closing the function call")?;
                    Ok(ExprAst::Unary {
                        op,
                        child: Box::new(arg),
                    })
                } else {
                    Ok(ExprAst::Variable(name))
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)` closing the group")?;
                Ok(inner)
            }
            _ => Err(ParseError::Syntax {
                offset,
                expected: "a number, variable, function call, `(`, or unary `-`".into(),
            }),
        }
    }
}

/// Parses `text` into an expression tree.
pub fn parse_expression(text: &str) -> Result<ExprAst, ParseError> {
    let tokens = lex(text)?;
    let end_offset = text.chars().count();
    if tokens.is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            expected: "an expression".into(),
        });
    }
    let mut parser = Parser { tokens, pos: 0, end_offset };
    let ast = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(ParseError::Syntax {
            offset: parser.offset(),
            expected: "end of input".into(),
        });
    }
    Ok(ast)
}
