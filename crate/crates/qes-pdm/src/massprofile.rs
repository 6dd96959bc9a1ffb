//! Mass profiles m(x): a small expression language with exact symbolic
//! first and second derivatives.
//!
//! Grammar (whitespace insignificant, `^` right-associative and tightest,
//! then unary minus, then `*`/`/`, then `+`/`-`):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | factor
//! factor := base ("^" unary)?
//! base   := number | ident | "(" expr ")" | func "(" expr ")"
//! func   := exp | ln | sqrt | sin | cos
//! ```
//!
//! `ident` is the variable `x` or a declared parameter name; numbers are
//! decimals with an optional exponent.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MassError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset} (declare it as a parameter)")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("malformed number at byte {offset}")]
    MalformedNumber { offset: usize },
    #[error("mass must be positive: m({x}) = {value}")]
    NonPositive { x: f64, value: f64 },
    #[error("m({x}) is not finite")]
    NonFinite { x: f64 },
    #[error("x = {x} outside the declared domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error(
        "symbolic derivative disagrees with finite differences at x = {x}: \
         symbolic {symbolic:.6e}, finite-difference {finite_diff:.6e}"
    )]
    DerivativeMismatch {
        x: f64,
        symbolic: f64,
        finite_diff: f64,
    },
    #[error("unknown built-in profile `{0}` (available: constant, rational2, quadratic)")]
    UnknownBuiltin(String),
    #[error("built-in profile `quadratic` needs a domain excluding x = 0")]
    QuadraticDomain,
    #[error("invalid domain [{lo}, {hi}]")]
    InvalidDomain { lo: f64, hi: f64 },
    #[error("parameter `{0}` is not finite")]
    BadParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Expression tree for m(x). Parameters stay symbolic so profiles print the
/// way they were written.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    Number(f64),
    Var,
    Param(String),
    Unary(UnaryOp, Box<ExprNode>),
    Binary(BinaryOp, Box<ExprNode>, Box<ExprNode>),
}

impl ExprNode {
    pub fn eval(&self, x: f64, params: &BTreeMap<String, f64>) -> f64 {
        match self {
            ExprNode::Number(v) => *v,
            ExprNode::Var => x,
            ExprNode::Param(name) => params.get(name).copied().unwrap_or(f64::NAN),
            ExprNode::Unary(op, a) => {
                let v = a.eval(x, params);
                match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Exp => v.exp(),
                    UnaryOp::Ln => v.ln(),
                    UnaryOp::Sqrt => v.sqrt(),
                    UnaryOp::Sin => v.sin(),
                    UnaryOp::Cos => v.cos(),
                }
            }
            ExprNode::Binary(op, a, b) => {
                let u = a.eval(x, params);
                let v = b.eval(x, params);
                match op {
                    BinaryOp::Add => u + v,
                    BinaryOp::Sub => u - v,
                    BinaryOp::Mul => u * v,
                    BinaryOp::Div => u / v,
                    BinaryOp::Pow => u.powf(v),
                }
            }
        }
    }

    fn contains_var(&self) -> bool {
        match self {
            ExprNode::Var => true,
            ExprNode::Number(_) | ExprNode::Param(_) => false,
            ExprNode::Unary(_, a) => a.contains_var(),
            ExprNode::Binary(_, a, b) => a.contains_var() || b.contains_var(),
        }
    }
}

// ---------------------------------------------------------------------------
// tokenizer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number `{v}`"),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, MassError> {
    let mut out = Vec::new();
    let mut iter = text.char_indices().peekable();
    while let Some(&(i, c)) = iter.peek() {
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                iter.next();
            }
            '+' => {
                out.push((i, Token::Plus));
                iter.next();
            }
            '-' | '\u{2212}' => {
                out.push((i, Token::Minus));
                iter.next();
            }
            '*' => {
                out.push((i, Token::Star));
                iter.next();
            }
            '/' => {
                out.push((i, Token::Slash));
                iter.next();
            }
            '^' => {
                out.push((i, Token::Caret));
                iter.next();
            }
            '(' => {
                out.push((i, Token::LParen));
                iter.next();
            }
            ')' => {
                out.push((i, Token::RParen));
                iter.next();
            }
            '0'..='9' | '.' => {
                let start = i;
                let bytes = text.as_bytes();
                let mut k = start;
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                if k < bytes.len() && bytes[k] == b'.' {
                    k += 1;
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                }
                if k < bytes.len() && (bytes[k] == b'e' || bytes[k] == b'E') {
                    let mut e = k + 1;
                    if e < bytes.len() && (bytes[e] == b'+' || bytes[e] == b'-') {
                        e += 1;
                    }
                    if e < bytes.len() && bytes[e].is_ascii_digit() {
                        k = e;
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                    }
                }
                let slice = &text[start..k];
                let v: f64 = slice
                    .parse()
                    .map_err(|_| MassError::MalformedNumber { offset: start })?;
                if !v.is_finite() {
                    return Err(MassError::MalformedNumber { offset: start });
                }
                out.push((start, Token::Number(v)));
                while matches!(iter.peek(), Some(&(j, _)) if j < k) {
                    iter.next();
                }
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut end = i;
                while let Some(&(j, ch)) = iter.peek() {
                    if ch.is_ascii_alphanumeric() || ch == '_' {
                        end = j + ch.len_utf8();
                        iter.next();
                    } else {
                        break;
                    }
                }
                out.push((start, Token::Ident(text[start..end].to_string())));
            }
            _ => {
                return Err(MassError::Syntax {
                    offset: i,
                    expected: "a number, identifier, operator, or parenthesis".into(),
                    found: format!("`{c}`"),
                });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// recursive-descent parser
// ---------------------------------------------------------------------------

const FUNCS: [(&str, UnaryOp); 5] = [
    ("exp", UnaryOp::Exp),
    ("ln", UnaryOp::Ln),
    ("sqrt", UnaryOp::Sqrt),
    ("sin", UnaryOp::Sin),
    ("cos", UnaryOp::Cos),
];

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end_offset: usize,
    params: &'a BTreeMap<String, f64>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or(self.end_offset)
    }

    fn found(&self) -> String {
        self.tokens
            .get(self.pos)
            .map(|(_, t)| t.describe())
            .unwrap_or_else(|| "end of input".into())
    }

    fn expect(&mut self, want: &Token, expected: &str) -> Result<(), MassError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(MassError::Syntax {
                offset: self.offset(),
                expected: expected.into(),
                found: self.found(),
            })
        }
    }

    fn expr(&mut self) -> Result<ExprNode, MassError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = fold_binary(BinaryOp::Add, lhs, rhs);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = fold_binary(BinaryOp::Sub, lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprNode, MassError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = fold_binary(BinaryOp::Mul, lhs, rhs);
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = fold_binary(BinaryOp::Div, lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ExprNode, MassError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(fold_neg(inner));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<ExprNode, MassError> {
        let base = self.base()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(fold_binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<ExprNode, MassError> {
        let offset = self.offset();
        let token = self.peek().cloned();
        self.pos += 1;
        match token {
            Some(Token::Number(v)) => Ok(ExprNode::Number(v)),
            Some(Token::Ident(name)) => {
                if let Some((_, op)) = FUNCS.iter().find(|(f, _)| *f == name) {
                    self.expect(&Token::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(&Token::RParen, "`)` closing the function argument")?;
                    Ok(ExprNode::Unary(*op, Box::new(arg)))
                } else if name == "x" {
                    Ok(ExprNode::Var)
                } else if self.params.contains_key(&name) {
                    Ok(ExprNode::Param(name))
                } else {
                    Err(MassError::UnknownIdentifier { name, offset })
                }
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(&Token::RParen, "`)`")?;
                Ok(inner)
            }
            other => Err(MassError::Syntax {
                offset,
                expected: "a number, identifier, function call, or `(`".into(),
                found: other
                    .map(|t| t.describe())
                    .unwrap_or_else(|| "end of input".into()),
            }),
        }
    }
}

fn fold_neg(inner: ExprNode) -> ExprNode {
    match inner {
        ExprNode::Number(v) => ExprNode::Number(-v),
        ExprNode::Unary(UnaryOp::Neg, a) => *a,
        other => ExprNode::Unary(UnaryOp::Neg, Box::new(other)),
    }
}

fn fold_binary(op: BinaryOp, a: ExprNode, b: ExprNode) -> ExprNode {
    use BinaryOp::*;
    use ExprNode::Number;
    if let (Number(u), Number(v)) = (&a, &b) {
        let folded = match op {
            Add => u + v,
            Sub => u - v,
            Mul => u * v,
            Div => u / v,
            Pow => u.powf(*v),
        };
        if folded.is_finite() {
            return Number(folded);
        }
    }
    match (op, &a, &b) {
        (Add, Number(z), _) if *z == 0.0 => return b,
        (Add, _, Number(z)) if *z == 0.0 => return a,
        (Sub, _, Number(z)) if *z == 0.0 => return a,
        (Sub, Number(z), _) if *z == 0.0 => return fold_neg(b),
        (Mul, Number(z), _) if *z == 0.0 => return Number(0.0),
        (Mul, _, Number(z)) if *z == 0.0 => return Number(0.0),
        (Mul, Number(one), _) if *one == 1.0 => return b,
        (Mul, _, Number(one)) if *one == 1.0 => return a,
        (Div, Number(z), _) if *z == 0.0 => return Number(0.0),
        (Div, _, Number(one)) if *one == 1.0 => return a,
        (Pow, _, Number(one)) if *one == 1.0 => return a,
        (Pow, _, Number(z)) if *z == 0.0 => return Number(1.0),
        _ => {}
    }
    ExprNode::Binary(op, Box::new(a), Box::new(b))
}

/// Parse a mass expression. Identifiers other than `x` must appear in
/// `params`.
pub fn parse_mass(text: &str, params: &BTreeMap<String, f64>) -> Result<ExprNode, MassError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end_offset: text.len(),
        params,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(MassError::Syntax {
            offset: p.offset(),
            expected: "end of input or an operator".into(),
            found: p.found(),
        });
    }
    Ok(e)
}

/// Exact symbolic derivative with constant folding. The grammar is closed
/// under differentiation.
pub fn differentiate(e: &ExprNode) -> ExprNode {
    use BinaryOp::*;
    match e {
        ExprNode::Number(_) | ExprNode::Param(_) => ExprNode::Number(0.0),
        ExprNode::Var => ExprNode::Number(1.0),
        ExprNode::Unary(op, a) => {
            let da = differentiate(a);
            let a = a.as_ref().clone();
            match op {
                UnaryOp::Neg => fold_neg(da),
                UnaryOp::Exp => fold_binary(Mul, ExprNode::Unary(UnaryOp::Exp, Box::new(a)), da),
                UnaryOp::Ln => fold_binary(Div, da, a),
                UnaryOp::Sqrt => fold_binary(
                    Div,
                    da,
                    fold_binary(
                        Mul,
                        ExprNode::Number(2.0),
                        ExprNode::Unary(UnaryOp::Sqrt, Box::new(a)),
                    ),
                ),
                UnaryOp::Sin => fold_binary(Mul, ExprNode::Unary(UnaryOp::Cos, Box::new(a)), da),
                UnaryOp::Cos => fold_neg(fold_binary(
                    Mul,
                    ExprNode::Unary(UnaryOp::Sin, Box::new(a)),
                    da,
                )),
            }
        }
        ExprNode::Binary(op, a, b) => {
            let da = differentiate(a);
            let db = differentiate(b);
            let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
            match op {
                Add => fold_binary(Add, da, db),
                Sub => fold_binary(Sub, da, db),
                Mul => fold_binary(
                    Add,
                    fold_binary(Mul, da, b.clone()),
                    fold_binary(Mul, a, db),
                ),
                Div => fold_binary(
                    Div,
                    fold_binary(
                        Sub,
                        fold_binary(Mul, da, b.clone()),
                        fold_binary(Mul, a, db),
                    ),
                    fold_binary(Pow, b, ExprNode::Number(2.0)),
                ),
                Pow => {
                    if !b.contains_var() {
                        // d(u^c) = c·u^(c−1)·u′
                        let c = b.clone();
                        let cm1 = fold_binary(Sub, b, ExprNode::Number(1.0));
                        fold_binary(Mul, fold_binary(Mul, c, fold_binary(Pow, a, cm1)), da)
                    } else {
                        // d(u^v) = u^v (v′ ln u + v u′/u)
                        let uv = fold_binary(Pow, a.clone(), b.clone());
                        let term1 =
                            fold_binary(Mul, db, ExprNode::Unary(UnaryOp::Ln, Box::new(a.clone())));
                        let term2 = fold_binary(Div, fold_binary(Mul, b, da), a);
                        fold_binary(Mul, uv, fold_binary(Add, term1, term2))
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// printing (precedence-aware; parse ∘ print is the identity on ASTs)
// ---------------------------------------------------------------------------

fn precedence(e: &ExprNode) -> u8 {
    match e {
        ExprNode::Number(_) | ExprNode::Var | ExprNode::Param(_) => 4,
        ExprNode::Unary(UnaryOp::Neg, _) => 2,
        ExprNode::Unary(..) => 4,
        ExprNode::Binary(BinaryOp::Pow, ..) => 3,
        ExprNode::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 1,
        ExprNode::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 0,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &ExprNode, min_prec: u8) -> fmt::Result {
    if precedence(child) < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprNode::Number(v) => {
                if *v < 0.0 {
                    // negative literals only arise from folding; print as unary
                    write!(f, "-{}", -v)
                } else {
                    write!(f, "{v}")
                }
            }
            ExprNode::Var => write!(f, "x"),
            ExprNode::Param(name) => write!(f, "{name}"),
            ExprNode::Unary(UnaryOp::Neg, a) => {
                write!(f, "-")?;
                write_child(f, a, 3)
            }
            ExprNode::Unary(op, a) => {
                let name = match op {
                    UnaryOp::Exp => "exp",
                    UnaryOp::Ln => "ln",
                    UnaryOp::Sqrt => "sqrt",
                    UnaryOp::Sin => "sin",
                    UnaryOp::Cos => "cos",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{name}({a})")
            }
            ExprNode::Binary(op, a, b) => match op {
                BinaryOp::Add => {
                    write_child(f, a, 0)?;
                    write!(f, " + ")?;
                    write_child(f, b, 1)
                }
                BinaryOp::Sub => {
                    write_child(f, a, 0)?;
                    write!(f, " - ")?;
                    write_child(f, b, 1)
                }
                BinaryOp::Mul => {
                    write_child(f, a, 1)?;
                    write!(f, "*")?;
                    write_child(f, b, 2)
                }
                BinaryOp::Div => {
                    write_child(f, a, 1)?;
                    write!(f, "/")?;
                    write_child(f, b, 2)
                }
                BinaryOp::Pow => {
                    write_child(f, a, 4)?;
                    write!(f, "^")?;
                    // the exponent re-enters through `unary`, so `-` is legal there
                    write_child(f, b, 2)
                }
            },
        }
    }
}

// ---------------------------------------------------------------------------
// MassProfile
// ---------------------------------------------------------------------------

const POSITIVITY_PROBES: usize = 1024;
const FD_STEP: f64 = 1e-5;
const FD_TOL_D1: f64 = 1e-6;
const FD_TOL_D2: f64 = 1e-4;

/// A positive mass function on a declared domain, carrying exact symbolic
/// first and second derivatives.
#[derive(Debug, Clone)]
pub struct MassProfile {
    pub expr: ExprNode,
    pub d1: ExprNode,
    pub d2: ExprNode,
    pub domain: (f64, f64),
    pub params: BTreeMap<String, f64>,
    pub text: String,
}

impl MassProfile {
    /// Parse, differentiate twice, and validate: positivity on a 1024-point
    /// probe of the domain and agreement of the symbolic derivatives with
    /// central finite differences.
    pub fn new(
        text: &str,
        params: BTreeMap<String, f64>,
        domain: (f64, f64),
    ) -> Result<Self, MassError> {
        if !(domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1) {
            return Err(MassError::InvalidDomain {
                lo: domain.0,
                hi: domain.1,
            });
        }
        for (k, v) in &params {
            if !v.is_finite() {
                return Err(MassError::BadParameter(k.clone()));
            }
        }
        let expr = parse_mass(text, &params)?;
        let d1 = differentiate(&expr);
        let d2 = differentiate(&d1);
        let profile = Self {
            expr,
            d1,
            d2,
            domain,
            params,
            text: text.to_string(),
        };
        profile.validate_positivity()?;
        profile.validate_derivatives()?;
        Ok(profile)
    }

    /// One of the built-in profiles: `constant` (m = m0), `rational2`
    /// (((a+x²)/(1+x²))²), or `quadratic` (c·x², domain must exclude 0).
    pub fn builtin(
        name: &str,
        overrides: BTreeMap<String, f64>,
        domain: (f64, f64),
    ) -> Result<Self, MassError> {
        let (text, defaults): (&str, &[(&str, f64)]) = match name {
            "constant" => ("m0", &[("m0", 1.0)]),
            "rational2" => ("((a + x^2)/(1 + x^2))^2", &[("a", 2.0)]),
            "quadratic" => ("c*x^2", &[("c", 1.0)]),
            other => return Err(MassError::UnknownBuiltin(other.to_string())),
        };
        if name == "quadratic" && domain.0 <= 0.0 && domain.1 >= 0.0 {
            return Err(MassError::QuadraticDomain);
        }
        let mut params: BTreeMap<String, f64> =
            defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in overrides {
            params.insert(k, v);
        }
        Self::new(text, params, domain)
    }

    fn validate_positivity(&self) -> Result<(), MassError> {
        let (lo, hi) = self.domain;
        for i in 0..POSITIVITY_PROBES {
            let x = lo + (hi - lo) * (i as f64 + 0.5) / POSITIVITY_PROBES as f64;
            let m = self.expr.eval(x, &self.params);
            if !m.is_finite() {
                return Err(MassError::NonFinite { x });
            }
            if m <= 0.0 {
                return Err(MassError::NonPositive { x, value: m });
            }
        }
        Ok(())
    }

    fn validate_derivatives(&self) -> Result<(), MassError> {
        let (lo, hi) = self.domain;
        let span = hi - lo;
        for i in 0..33 {
            // stay clear of the domain edges so the FD stencil fits
            let x = lo + span * (0.05 + 0.9 * i as f64 / 32.0);
            let h = FD_STEP * span.max(1.0);
            let f = |t: f64| self.expr.eval(t, &self.params);
            let fd1 = (f(x + h) - f(x - h)) / (2.0 * h);
            let sym1 = self.d1.eval(x, &self.params);
            if !fd1.is_finite() || !sym1.is_finite() {
                continue;
            }
            let scale = sym1.abs().max(fd1.abs()).max(f(x).abs()).max(1.0);
            if (sym1 - fd1).abs() > FD_TOL_D1 * scale {
                return Err(MassError::DerivativeMismatch {
                    x,
                    symbolic: sym1,
                    finite_diff: fd1,
                });
            }
            let h2 = 10.0 * h;
            let fd2 = (f(x + h2) - 2.0 * f(x) + f(x - h2)) / (h2 * h2);
            let sym2 = self.d2.eval(x, &self.params);
            if fd2.is_finite() && sym2.is_finite() {
                let scale2 = sym2.abs().max(fd2.abs()).max(1.0);
                if (sym2 - fd2).abs() > FD_TOL_D2 * scale2 {
                    return Err(MassError::DerivativeMismatch {
                        x,
                        symbolic: sym2,
                        finite_diff: fd2,
                    });
                }
            }
        }
        Ok(())
    }

    /// (m, m′, m″) at x, with domain and positivity enforcement.
    pub fn eval(&self, x: f64) -> Result<(f64, f64, f64), MassError> {
        let (lo, hi) = self.domain;
        if x < lo || x > hi {
            return Err(MassError::OutOfDomain { x, lo, hi });
        }
        let triple = self.eval_unchecked(x);
        let (m, m1, m2) = triple;
        if !(m.is_finite() && m1.is_finite() && m2.is_finite()) {
            return Err(MassError::NonFinite { x });
        }
        if m <= 0.0 {
            return Err(MassError::NonPositive { x, value: m });
        }
        Ok(triple)
    }

    /// (m, m′, m″) without domain checks. Used for auxiliary quadrature just
    /// outside the grid (e.g. the arc-length offset below a radial grid).
    pub fn eval_unchecked(&self, x: f64) -> (f64, f64, f64) {
        (
            self.expr.eval(x, &self.params),
            self.d1.eval(x, &self.params),
            self.d2.eval(x, &self.params),
        )
    }
}
