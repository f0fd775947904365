//! Parser for Laurent-polynomial expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*        a '/' divisor must be a monomial
//! unary  := '-' unary | factor
//! factor := base ('^' int)?
//! base   := int | var | '(' expr ')'
//! int    := '-'? [0-9]+
//! ```
//!
//! `^` binds tighter than unary minus, so `-x1^2` is `-(x1^2)`. Negative
//! exponents are accepted only on monomial-valued bases.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::error::Error as CoreError;
use crate::laurent::{ExponentVector, LaurentPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    /// Byte offset into the source text.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: String, found: String },
    UndeclaredVariable(String),
    InvalidVariableName(String),
    DuplicateVariable(String),
    ExponentOverflow { bound: u32 },
    NonIntegerExponent,
    NonMonomialDivisor,
    DivisionByZero,
    NegativePowerOfNonMonomial,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax { expected, found } => {
                write!(f, "syntax error: expected {expected}, found {found}")
            }
            ParseErrorKind::UndeclaredVariable(v) => write!(f, "undeclared variable {v}"),
            ParseErrorKind::InvalidVariableName(v) => write!(f, "invalid variable name {v:?}"),
            ParseErrorKind::DuplicateVariable(v) => write!(f, "variable {v} declared twice"),
            ParseErrorKind::ExponentOverflow { bound } => {
                write!(f, "exponent overflow: magnitude exceeds {bound}")
            }
            ParseErrorKind::NonIntegerExponent => f.write_str("exponent must be an integer literal"),
            ParseErrorKind::NonMonomialDivisor => f.write_str("divisor must be a monomial"),
            ParseErrorKind::DivisionByZero => f.write_str("division by zero"),
            ParseErrorKind::NegativePowerOfNonMonomial => {
                f.write_str("negative exponent on a non-monomial base")
            }
        }
    }
}

impl ParseError {
    fn new(position: usize, kind: ParseErrorKind) -> Self {
        ParseError { position, kind }
    }
}

/// Expression text together with the ordered variable names it may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprSource {
    text: String,
    var_names: Vec<String>,
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric())
}

/// Checks that names are distinct identifiers.
pub fn validate_var_names<S: AsRef<str>>(names: &[S]) -> Result<(), ParseError> {
    for (i, name) in names.iter().enumerate() {
        let name = name.as_ref();
        if !is_identifier(name) {
            return Err(ParseError::new(0, ParseErrorKind::InvalidVariableName(name.to_string())));
        }
        if names[..i].iter().any(|n| n.as_ref() == name) {
            return Err(ParseError::new(0, ParseErrorKind::DuplicateVariable(name.to_string())));
        }
    }
    Ok(())
}

impl ExprSource {
    pub fn new(text: impl Into<String>, var_names: Vec<String>) -> Result<Self, ParseError> {
        validate_var_names(&var_names)?;
        Ok(ExprSource {
            text: text.into(),
            var_names,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Largest accepted magnitude of an exponent literal.
    pub max_exponent: u32,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { max_exponent: 1 << 20 }
    }
}

pub fn parse_laurent(src: &ExprSource) -> Result<LaurentPoly, ParseError> {
    parse_laurent_with(src, ParseOptions::default())
}

pub fn parse_laurent_with(src: &ExprSource, options: ParseOptions) -> Result<LaurentPoly, ParseError> {
    let tokens = lex(&src.text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        vars: &src.var_names,
        options,
    };
    let value = parser.expr()?;
    parser.expect_end()?;
    Ok(value)
}

/// Convenience wrapper: parse `text` over `vars`.
pub fn parse(text: &str, vars: &[&str]) -> Result<LaurentPoly, ParseError> {
    let src = ExprSource::new(text, vars.iter().map(|s| s.to_string()).collect())?;
    parse_laurent(&src)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Decimal,
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Decimal => f.write_str("decimal literal"),
            Tok::Ident(s) => write!(f, "identifier {s}"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    out.push((start, Tok::Decimal));
                } else {
                    out.push((start, Tok::Int(digits.parse().expect("ascii digits"))));
                }
                continue;
            }
            b'.' => {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Decimal));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::new(
                    start,
                    ParseErrorKind::Syntax {
                        expected: "expression".into(),
                        found: format!("character {ch:?}"),
                    },
                ));
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    vars: &'a [String],
    options: ParseOptions,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn syntax(&self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Tok::Decimal => "decimal literal (floating-point numbers are not supported)".to_string(),
            t => t.to_string(),
        };
        ParseError::new(
            self.offset(),
            ParseErrorKind::Syntax {
                expected: expected.to_string(),
                found,
            },
        )
    }

    fn lift(&self, at: usize, e: CoreError) -> ParseError {
        match e {
            CoreError::ExponentOverflow => ParseError::new(
                at,
                ParseErrorKind::ExponentOverflow {
                    bound: i32::MAX as u32,
                },
            ),
            other => ParseError::new(
                at,
                ParseErrorKind::Syntax {
                    expected: "well-formed expression".into(),
                    found: other.to_string(),
                },
            ),
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => Err(self.syntax("operator or end of input")),
        }
    }

    fn expr(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            let at = self.offset();
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.add(&rhs).map_err(|e| self.lift(at, e))?;
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.sub(&rhs).map_err(|e| self.lift(at, e))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let at = self.offset();
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs).map_err(|e| self.lift(at, e))?;
                }
                Tok::Slash => {
                    self.bump();
                    let divisor_at = self.offset();
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return Err(ParseError::new(divisor_at, ParseErrorKind::DivisionByZero));
                    }
                    let inv = rhs
                        .monomial_inverse()
                        .ok_or_else(|| ParseError::new(divisor_at, ParseErrorKind::NonMonomialDivisor))?
                        .map_err(|e| self.lift(divisor_at, e))?;
                    acc = acc.mul(&inv).map_err(|e| self.lift(at, e))?;
                }
                Tok::Ident(_) | Tok::Int(_) | Tok::LParen => {
                    return Err(self.syntax("'*' (implicit multiplication is not supported)"));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<LaurentPoly, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<LaurentPoly, ParseError> {
        let base_at = self.offset();
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp_at = self.offset();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let magnitude = match self.bump() {
            (_, Tok::Int(n)) => n,
            _ => return Err(ParseError::new(exp_at, ParseErrorKind::NonIntegerExponent)),
        };
        let bound = self.options.max_exponent;
        let k = magnitude
            .to_u32()
            .filter(|&k| k <= bound)
            .ok_or_else(|| ParseError::new(exp_at, ParseErrorKind::ExponentOverflow { bound }))?;
        if !negative {
            return base.pow(k).map_err(|e| self.lift(exp_at, e));
        }
        if base.is_zero() {
            return Err(ParseError::new(base_at, ParseErrorKind::DivisionByZero));
        }
        let inv = base
            .monomial_inverse()
            .ok_or_else(|| ParseError::new(base_at, ParseErrorKind::NegativePowerOfNonMonomial))?
            .map_err(|e| self.lift(exp_at, e))?;
        inv.pow(k).map_err(|e| self.lift(exp_at, e))
    }

    fn base(&mut self) -> Result<LaurentPoly, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(LaurentPoly::constant(self.nvars(), Rational::from_integer(n)))
            }
            Tok::Ident(name) => {
                self.bump();
                let idx = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| ParseError::new(at, ParseErrorKind::UndeclaredVariable(name.clone())))?;
                let mut e = vec![0; self.nvars()];
                e[idx] = 1;
                Ok(LaurentPoly::monomial(self.nvars(), ExponentVector::new(e), Rational::from_integer(1.into()))
                    .expect("length matches"))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.syntax("')'"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.syntax("integer, variable or '('")),
        }
    }
}
