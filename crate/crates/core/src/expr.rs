//! A small expression language for scalar fields.
//!
//! Grammar (standard precedence, `^` right-associative):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | ident | ident '(' args ')' | '(' expr ')'
//! ```
//!
//! Every expression evaluates to a complex value over any [`Real`] ring.
//! `i()` is the imaginary unit.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::complex::Cx;
use crate::jet::{NumError, Real, ScalarProgram};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at {line}:{col}: found {found}, expected one of {expected:?}")]
    Syntax { line: usize, col: usize, found: String, expected: Vec<String> },
    #[error("unknown function `{name}` at {line}:{col}")]
    UnknownFunction { name: String, line: usize, col: usize },
    #[error("function `{name}` takes {expected} argument(s), got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("expression is not real-valued (imaginary part {0:e})")]
    NotReal(f64),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Abs2,
    Re,
    Im,
    Conj,
    I,
    Atan2,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs2" => Func::Abs2,
            "re" => Func::Re,
            "im" => Func::Im,
            "conj" => Func::Conj,
            "i" => Func::I,
            "atan2" => Func::Atan2,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs2 => "abs2",
            Func::Re => "re",
            Func::Im => "im",
            Func::Conj => "conj",
            Func::I => "i",
            Func::Atan2 => "atan2",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::I => 0,
            Func::Atan2 => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    /// Operator and call levels on the longest root-to-leaf path; leaves count 0.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var(_) => 0,
            Expr::Neg(a) => 1 + a.depth(),
            Expr::Bin(_, a, b) => 1 + a.depth().max(b.depth()),
            Expr::Call(_, args) => 1 + args.iter().map(Expr::depth).max().unwrap_or(0),
        }
    }

    /// Free variable names in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Neg(a) => a.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_child(f, 3)
            }
            Expr::Bin(op, a, b) => {
                let p = self.prec();
                if *op == BinOp::Pow {
                    a.fmt_child(f, 5)?;
                    write!(f, "^")?;
                    b.fmt_child(f, 3)
                } else {
                    a.fmt_child(f, p)?;
                    write!(f, " {} ", op.symbol())?;
                    b.fmt_child(f, p + 1)
                }
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            k += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            k += 1;
            continue;
        }
        let single = match c {
            '+' | '*' | '/' | '^' => Some(Tok::Op(c)),
            '-' | '\u{2212}' => Some(Tok::Op('-')),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, line: l0, col: c0 });
            k += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    k = j;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let text: String = chars[start..k].iter().collect();
            let v: f64 = text.parse().map_err(|_| ExprError::Syntax {
                line: l0,
                col: c0,
                found: format!("malformed number `{text}`"),
                expected: vec!["number".into()],
            })?;
            col += k - start;
            out.push(Spanned { tok: Tok::Num(v), line: l0, col: c0 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            let text: String = chars[start..k].iter().collect();
            col += k - start;
            out.push(Spanned { tok: Tok::Ident(text), line: l0, col: c0 });
            continue;
        }
        return Err(ExprError::Syntax {
            line: l0,
            col: c0,
            found: format!("character `{c}`"),
            expected: vec!["number".into(), "identifier".into(), "operator".into(), "`(`".into()],
        });
    }
    out.push(Spanned { tok: Tok::End, line, col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    declared: Option<&'a [&'a str]>,
}

impl Parser<'_> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ExprError> {
        let t = self.peek();
        Err(ExprError::Syntax {
            line: t.line,
            col: t.col,
            found: t.tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek().tok == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return self.fail(&["`)`", "operator"]);
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if self.peek().tok == Tok::LParen {
                    let func =
                        Func::lookup(&name).ok_or_else(|| ExprError::UnknownFunction { name: name.clone(), line: t.line, col: t.col })?;
                    self.bump();
                    let mut args = Vec::new();
                    if self.peek().tok != Tok::RParen {
                        loop {
                            args.push(self.expr()?);
                            match self.peek().tok {
                                Tok::Comma => {
                                    self.bump();
                                }
                                Tok::RParen => break,
                                _ => return self.fail(&["`,`", "`)`"]),
                            }
                        }
                    }
                    self.bump();
                    if args.len() != func.arity() {
                        return Err(ExprError::Arity { name: func.name().into(), expected: func.arity(), found: args.len() });
                    }
                    Ok(Expr::Call(func, args))
                } else {
                    if let Some(decl) = self.declared {
                        if !decl.contains(&name.as_str()) {
                            return Err(ExprError::UnboundVariable(name));
                        }
                    }
                    Ok(Expr::Var(name))
                }
            }
            _ => self.fail(&["number", "identifier", "`(`", "`-`"]),
        }
    }
}

fn parse_inner(src: &str, declared: Option<&[&str]>) -> Result<Expr, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, declared };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(e)
}

/// Parse without restricting identifiers.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    parse_inner(src, None)
}

/// Parse, rejecting identifiers outside `declared`.
pub fn parse_declared(src: &str, declared: &[&str]) -> Result<Expr, ExprError> {
    parse_inner(src, Some(declared))
}

/// Named complex values visible to an expression.
#[derive(Debug, Clone)]
pub struct BindingSet<T> {
    values: HashMap<String, Cx<T>>,
}

impl<T: Real> Default for BindingSet<T> {
    fn default() -> Self {
        BindingSet { values: HashMap::new() }
    }
}

impl<T: Real> BindingSet<T> {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn set(&mut self, name: &str, v: Cx<T>) -> &mut Self {
        self.values.insert(name.to_string(), v);
        self
    }
    pub fn set_real(&mut self, name: &str, v: T) -> &mut Self {
        self.set(name, Cx::real(v))
    }
    pub fn get(&self, name: &str) -> Result<Cx<T>, ExprError> {
        self.values.get(name).copied().ok_or_else(|| ExprError::UnboundVariable(name.to_string()))
    }
}

fn is_real<T: Real>(z: &Cx<T>) -> bool {
    z.im.is_exact_zero()
}

fn csqrt<T: Real>(z: Cx<T>) -> Result<Cx<T>, ExprError> {
    if is_real(&z) {
        return Ok(Cx::real(z.re.checked_sqrt()?));
    }
    let r = z.abs2().sqrt().sqrt();
    let th = z.im.atan2(z.re) * 0.5;
    Ok(Cx::new(r * th.cos(), r * th.sin()))
}

fn clog<T: Real>(z: Cx<T>) -> Result<Cx<T>, ExprError> {
    if is_real(&z) {
        return Ok(Cx::real(z.re.checked_ln()?));
    }
    let m = z.abs2().checked_ln()? * 0.5;
    Ok(Cx::new(m, z.im.atan2(z.re)))
}

fn cpow<T: Real>(b: Cx<T>, e: Cx<T>) -> Result<Cx<T>, ExprError> {
    if is_real(&e) && e.re.is_constant() {
        let n = e.re.val();
        if n.fract() == 0.0 && n.abs() <= 64.0 {
            if n < 0.0 && b.abs2().val() < crate::jet::DIV_EPS {
                return Err(NumError::DivisionByZero(b.abs2().val()).into());
            }
            return Ok(b.powi(n as i32));
        }
    }
    if is_real(&e) && is_real(&b) {
        return Ok(Cx::real((e.re * b.re.checked_ln()?).exp()));
    }
    Ok((e * clog(b)?).exp())
}

/// Evaluate over any ring; all operations are complex.
pub fn eval<T: Real>(e: &Expr, b: &BindingSet<T>) -> Result<Cx<T>, ExprError> {
    Ok(match e {
        Expr::Num(v) => Cx::cst(*v, 0.0),
        Expr::Var(name) => b.get(name)?,
        Expr::Neg(a) => -eval(a, b)?,
        Expr::Bin(op, l, r) => {
            let (x, y) = (eval(l, b)?, eval(r, b)?);
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if is_real(&y) {
                        let inv = y.re.checked_recip()?;
                        Cx::new(x.re * inv, x.im * inv)
                    } else {
                        x.checked_div(y)?
                    }
                }
                BinOp::Pow => cpow(x, y)?,
            }
        }
        Expr::Call(f, args) => {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval(a, b)?);
            }
            match f {
                Func::I => Cx::i(),
                Func::Sqrt => csqrt(vals[0])?,
                Func::Exp => vals[0].exp(),
                Func::Log => clog(vals[0])?,
                Func::Sin => {
                    if is_real(&vals[0]) {
                        Cx::real(vals[0].re.sin())
                    } else {
                        vals[0].sin()
                    }
                }
                Func::Cos => {
                    if is_real(&vals[0]) {
                        Cx::real(vals[0].re.cos())
                    } else {
                        vals[0].cos()
                    }
                }
                Func::Abs2 => Cx::real(vals[0].abs2()),
                Func::Re => Cx::real(vals[0].re),
                Func::Im => Cx::real(vals[0].im),
                Func::Conj => vals[0].conj(),
                Func::Atan2 => Cx::real(vals[0].re.atan2(vals[1].re)),
            }
        }
    })
}

/// Tolerance on the imaginary part in real-valued contexts.
pub const REAL_TOL: f64 = 1e-10;

/// Evaluate and require a real result.
pub fn eval_real<T: Real>(e: &Expr, b: &BindingSet<T>) -> Result<T, ExprError> {
    let z = eval(e, b)?;
    if z.im.val().abs() > REAL_TOL {
        return Err(ExprError::NotReal(z.im.val()));
    }
    Ok(z.re)
}

/// How chart coordinates are exposed to expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum ChartBinding {
    /// Four real names for `x0..x3`.
    Real([String; 4]),
    /// Two complex names: first = x0 + i x1, second = x2 + i x3.
    Complex([String; 2]),
}

impl ChartBinding {
    pub fn real(names: [&str; 4]) -> Self {
        ChartBinding::Real(names.map(String::from))
    }
    pub fn complex(names: [&str; 2]) -> Self {
        ChartBinding::Complex(names.map(String::from))
    }

    pub fn names(&self) -> Vec<&str> {
        match self {
            ChartBinding::Real(n) => n.iter().map(String::as_str).collect(),
            ChartBinding::Complex(n) => n.iter().map(String::as_str).collect(),
        }
    }

    pub fn bind<T: Real>(&self, x: &[T; 4]) -> BindingSet<T> {
        let mut b = BindingSet::new();
        match self {
            ChartBinding::Real(n) => {
                for k in 0..4 {
                    b.set_real(&n[k], x[k]);
                }
            }
            ChartBinding::Complex(n) => {
                b.set(&n[0], Cx::new(x[0], x[1]));
                b.set(&n[1], Cx::new(x[2], x[3]));
            }
        }
        b
    }

    pub fn parse(&self, src: &str) -> Result<Expr, ExprError> {
        parse_declared(src, &self.names())
    }
}

/// A real scalar field given by an expression over a chart.
#[derive(Debug, Clone)]
pub struct ExprField {
    pub expr: Expr,
    pub binding: ChartBinding,
}

impl ExprField {
    pub fn new(src: &str, binding: ChartBinding) -> Result<Self, ExprError> {
        Ok(ExprField { expr: binding.parse(src)?, binding })
    }

    pub fn eval_complex<T: Real>(&self, x: &[T; 4]) -> Result<Cx<T>, ExprError> {
        eval(&self.expr, &self.binding.bind(x))
    }

    pub fn eval_real<T: Real>(&self, x: &[T; 4]) -> Result<T, ExprError> {
        eval_real(&self.expr, &self.binding.bind(x))
    }
}

impl ScalarProgram for ExprField {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<T, NumError> {
        match self.eval_real(x) {
            Ok(v) => Ok(v),
            Err(ExprError::Num(e)) => Err(e),
            Err(ExprError::NotReal(v)) => Err(NumError::Domain { op: "real part", value: v }),
            Err(_) => Err(NumError::Domain { op: "binding", value: f64::NAN }),
        }
    }
}
