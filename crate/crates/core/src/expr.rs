//! A small closed-form expression language.
//!
//! Kernels `psi`, dilation maps `s_k`, radial profiles and commutator symbols
//! are all written in this grammar. The language has no user-defined
//! branching, so the local power behaviour of an expression at the faces of
//! the integration domain can be read off the tree (see [`Expr::asymptote`]),
//! and the common integrable families can be recognised exactly (see
//! [`Expr::classify`]).
//!
//! ```text
//! expr    = term , { ("+" | "-") , term } ;
//! term    = unary , { ("*" | "/") , unary } ;
//! unary   = ("-" | "+") , unary | power ;
//! power   = atom , [ "^" , unary ] ;            (* exponent must be constant *)
//! atom    = number | "pi" | "e" | "r" | "t" , digits
//!         | func , "(" , expr , { "," , expr } , ")"
//!         | "(" , expr , ")" ;
//! func    = "pow" | "log" | "exp" | "abs" | "sqrt" | "min" | "norm1m" ;
//! ```
//!
//! `norm1m(a, b, ...)` is the Euclidean norm of its arguments; the Riesz-type
//! kernel `|(1-t1, ..., 1-tm)|^a` is written `norm1m(1-t1, ..., 1-tm)^a`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable t{index} at position {pos} exceeds arity {arity}")]
    Arity { pos: usize, index: usize, arity: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unbound variable {0}")]
    Unbound(String),
}

/// Expression tree. Variables `t_i` are stored zero-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Radius,
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, f64),
    Abs(Box<Expr>),
    Log(Box<Expr>),
    Exp(Box<Expr>),
    Min(Vec<Expr>),
    /// `offset + slope * t_var`
    Affine {
        offset: f64,
        slope: f64,
        var: usize,
    },
    Norm(Vec<Expr>),
}

/// Values for the free variables of an expression.
#[derive(Debug, Clone, Copy, Default)]
pub struct Binding<'a> {
    pub t: &'a [f64],
    pub r: Option<f64>,
}

impl<'a> Binding<'a> {
    pub fn t(t: &'a [f64]) -> Self {
        Binding { t, r: None }
    }

    pub fn r(r: f64) -> Binding<'static> {
        Binding { t: &[], r: Some(r) }
    }
}

fn is_integer(x: f64) -> bool {
    x.is_finite() && x.fract() == 0.0
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// One-based variable `t_i`.
    pub fn t(i: usize) -> Expr {
        assert!(i >= 1, "variables are numbered from t1");
        Expr::Var(i - 1)
    }

    pub fn radius() -> Expr {
        Expr::Radius
    }

    pub fn powf(self, exponent: f64) -> Expr {
        match self {
            Expr::Const(c) if c > 0.0 || is_integer(exponent) && c != 0.0 => Expr::Const(c.powf(exponent)),
            base if exponent == 1.0 => base,
            base => Expr::Pow(Box::new(base), exponent),
        }
    }

    pub fn abs(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(c.abs()),
            e => Expr::Abs(Box::new(e)),
        }
    }

    pub fn ln(self) -> Expr {
        Expr::Log(Box::new(self))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    /// Flattening product with constant folding.
    pub fn product(factors: Vec<Expr>) -> Expr {
        let mut c = 1.0;
        let mut rest = Vec::new();
        for f in factors {
            match f {
                Expr::Const(v) => c *= v,
                Expr::Product(inner) => {
                    for g in inner {
                        match g {
                            Expr::Const(v) => c *= v,
                            g => rest.push(g),
                        }
                    }
                }
                g => rest.push(g),
            }
        }
        if rest.is_empty() || c == 0.0 {
            return Expr::Const(c);
        }
        if c != 1.0 {
            rest.insert(0, Expr::Const(c));
        }
        if rest.len() == 1 {
            rest.pop().unwrap()
        } else {
            Expr::Product(rest)
        }
    }

    /// Flattening sum; `c + b*t_i` collapses to [`Expr::Affine`].
    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut c = 0.0;
        let mut rest = Vec::new();
        for term in terms {
            match term {
                Expr::Const(v) => c += v,
                Expr::Sum(inner) => {
                    for g in inner {
                        match g {
                            Expr::Const(v) => c += v,
                            g => rest.push(g),
                        }
                    }
                }
                Expr::Affine { offset, slope, var } => {
                    c += offset;
                    rest.push(Expr::product(vec![Expr::Const(slope), Expr::Var(var)]));
                }
                g => rest.push(g),
            }
        }
        if rest.is_empty() {
            return Expr::Const(c);
        }
        if rest.len() == 1 {
            match &rest[0] {
                Expr::Var(i) => {
                    return Expr::Affine { offset: c, slope: 1.0, var: *i };
                }
                Expr::Product(fs) if fs.len() == 2 => {
                    if let (Expr::Const(b), Expr::Var(i)) = (&fs[0], &fs[1]) {
                        return Expr::Affine { offset: c, slope: *b, var: *i };
                    }
                }
                _ => {}
            }
            if c == 0.0 {
                return rest.pop().unwrap();
            }
        }
        if c != 0.0 {
            rest.insert(0, Expr::Const(c));
        }
        Expr::Sum(rest)
    }

    pub fn eval(&self, b: Binding<'_>) -> Result<f64, ExprError> {
        let v = self.eval_inner(b)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::Domain(format!("non-finite value in {self}")))
        }
    }

    pub fn eval_t(&self, t: &[f64]) -> Result<f64, ExprError> {
        self.eval(Binding::t(t))
    }

    pub fn eval_r(&self, r: f64) -> Result<f64, ExprError> {
        self.eval(Binding::r(r))
    }

    fn eval_inner(&self, b: Binding<'_>) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => *b.t.get(*i).ok_or_else(|| ExprError::Unbound(format!("t{}", i + 1)))?,
            Expr::Radius => b.r.ok_or_else(|| ExprError::Unbound("r".into()))?,
            Expr::Sum(ts) => {
                let mut s = 0.0;
                for t in ts {
                    s += t.eval_inner(b)?;
                }
                s
            }
            Expr::Product(fs) => {
                let mut s = 1.0;
                for f in fs {
                    s *= f.eval_inner(b)?;
                }
                s
            }
            Expr::Pow(base, p) => {
                let x = base.eval_inner(b)?;
                if x < 0.0 && !is_integer(*p) {
                    return Err(ExprError::Domain(format!("fractional power {p} of negative value {x}")));
                }
                if x == 0.0 && *p < 0.0 {
                    return Err(ExprError::Domain(format!("pole: 0^{p}")));
                }
                x.powf(*p)
            }
            Expr::Abs(e) => e.eval_inner(b)?.abs(),
            Expr::Log(e) => {
                let x = e.eval_inner(b)?;
                if x <= 0.0 {
                    return Err(ExprError::Domain(format!("log of non-positive value {x}")));
                }
                x.ln()
            }
            Expr::Exp(e) => e.eval_inner(b)?.exp(),
            Expr::Min(es) => {
                let mut m = f64::INFINITY;
                for e in es {
                    m = m.min(e.eval_inner(b)?);
                }
                m
            }
            Expr::Affine { offset, slope, var } => {
                let x = *b.t.get(*var).ok_or_else(|| ExprError::Unbound(format!("t{}", var + 1)))?;
                offset + slope * x
            }
            Expr::Norm(es) => {
                let mut s = 0.0;
                for e in es {
                    let v = e.eval_inner(b)?;
                    s += v * v;
                }
                s.sqrt()
            }
        })
    }

    /// Largest variable index (one-based) appearing in the expression.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Var(i) | Expr::Affine { var: i, .. } => i + 1,
            Expr::Const(_) | Expr::Radius => 0,
            Expr::Sum(es) | Expr::Product(es) | Expr::Min(es) | Expr::Norm(es) => {
                es.iter().map(Expr::arity).max().unwrap_or(0)
            }
            Expr::Pow(e, _) | Expr::Abs(e) | Expr::Log(e) | Expr::Exp(e) => e.arity(),
        }
    }

    pub fn uses_radius(&self) -> bool {
        match self {
            Expr::Radius => true,
            Expr::Const(_) | Expr::Var(_) | Expr::Affine { .. } => false,
            Expr::Sum(es) | Expr::Product(es) | Expr::Min(es) | Expr::Norm(es) => es.iter().any(Expr::uses_radius),
            Expr::Pow(e, _) | Expr::Abs(e) | Expr::Log(e) | Expr::Exp(e) => e.uses_radius(),
        }
    }

    /// Whether the zero-based variable `v` appears.
    pub fn uses_var(&self, v: usize) -> bool {
        match self {
            Expr::Var(i) | Expr::Affine { var: i, .. } => *i == v,
            Expr::Const(_) | Expr::Radius => false,
            Expr::Sum(es) | Expr::Product(es) | Expr::Min(es) | Expr::Norm(es) => es.iter().any(|e| e.uses_var(v)),
            Expr::Pow(e, _) | Expr::Abs(e) | Expr::Log(e) | Expr::Exp(e) => e.uses_var(v),
        }
    }

    /// Renumber variables; `map[i]` is the new zero-based index of `t_{i+1}`.
    pub fn remap_vars(&self, map: &[usize]) -> Expr {
        let sub = |e: &Expr| e.remap_vars(map);
        match self {
            Expr::Var(i) => Expr::Var(map[*i]),
            Expr::Affine { offset, slope, var } => Expr::Affine { offset: *offset, slope: *slope, var: map[*var] },
            Expr::Const(_) | Expr::Radius => self.clone(),
            Expr::Sum(es) => Expr::Sum(es.iter().map(sub).collect()),
            Expr::Product(es) => Expr::Product(es.iter().map(sub).collect()),
            Expr::Min(es) => Expr::Min(es.iter().map(sub).collect()),
            Expr::Norm(es) => Expr::Norm(es.iter().map(sub).collect()),
            Expr::Pow(e, p) => Expr::Pow(Box::new(sub(e)), *p),
            Expr::Abs(e) => Expr::Abs(Box::new(sub(e))),
            Expr::Log(e) => Expr::Log(Box::new(sub(e))),
            Expr::Exp(e) => Expr::Exp(Box::new(sub(e))),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    /// Replace the radial variable `r` by another expression.
    pub fn substitute_radius(&self, with: &Expr) -> Expr {
        let sub = |e: &Expr| e.substitute_radius(with);
        match self {
            Expr::Radius => with.clone(),
            Expr::Const(_) | Expr::Var(_) | Expr::Affine { .. } => self.clone(),
            Expr::Sum(es) => Expr::sum(es.iter().map(sub).collect()),
            Expr::Product(es) => Expr::product(es.iter().map(sub).collect()),
            Expr::Min(es) => Expr::Min(es.iter().map(sub).collect()),
            Expr::Norm(es) => Expr::Norm(es.iter().map(sub).collect()),
            Expr::Pow(e, p) => Expr::Pow(Box::new(sub(e)), *p),
            Expr::Abs(e) => Expr::Abs(Box::new(sub(e))),
            Expr::Log(e) => Expr::Log(Box::new(sub(e))),
            Expr::Exp(e) => Expr::Exp(Box::new(sub(e))),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s = &text[start..i];
            let v: f64 =
                s.parse().map_err(|_| ExprError::Syntax { pos: start, msg: format!("malformed number '{s}'") })?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(ExprError::Syntax { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    arity: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ExprError::Syntax { pos: self.pos(), msg: format!("expected '{c}'") })
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                let t = self.term()?;
                terms.push(Expr::product(vec![Expr::Const(-1.0), t]));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat('*') {
                factors.push(self.unary()?);
            } else if self.eat('/') {
                let pos = self.pos();
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(ExprError::Syntax { pos, msg: "division by zero".into() });
                }
                factors.push(d.powf(-1.0));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::product(factors) })
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            let e = self.unary()?;
            return Ok(Expr::product(vec![Expr::Const(-1.0), e]));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn constant_exponent(&mut self) -> Result<f64, ExprError> {
        let pos = self.pos();
        let e = self.unary()?;
        e.eval(Binding::default())
            .map_err(|_| ExprError::Syntax { pos, msg: "exponent must be a finite constant".into() })
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            let p = self.constant_exponent()?;
            return Ok(base.powf(p));
        }
        Ok(base)
    }

    fn args(&mut self) -> Result<Vec<Expr>, ExprError> {
        self.expect('(')?;
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let pos = self.pos();
        let tok = self
            .toks
            .get(self.idx)
            .map(|(t, _)| t.clone())
            .ok_or(ExprError::Syntax { pos, msg: "unexpected end of input".into() })?;
        self.idx += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym(c) => Err(ExprError::Syntax { pos, msg: format!("unexpected '{c}'") }),
            Tok::Ident(name) => self.ident(name, pos),
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<Expr, ExprError> {
        let unary = |p: &mut Parser, pos: usize| -> Result<Expr, ExprError> {
            let mut a = p.args()?;
            if a.len() != 1 {
                return Err(ExprError::Syntax { pos, msg: "expected one argument".into() });
            }
            Ok(a.pop().unwrap())
        };
        match name.as_str() {
            "pi" => Ok(Expr::Const(std::f64::consts::PI)),
            "e" => Ok(Expr::Const(std::f64::consts::E)),
            "r" => Ok(Expr::Radius),
            "log" | "ln" => Ok(unary(self, pos)?.ln()),
            "exp" => Ok(unary(self, pos)?.exp()),
            "abs" => Ok(unary(self, pos)?.abs()),
            "sqrt" => Ok(unary(self, pos)?.powf(0.5)),
            "min" => {
                let a = self.args()?;
                Ok(if a.len() == 1 { a.into_iter().next().unwrap() } else { Expr::Min(a) })
            }
            "norm1m" => Ok(Expr::Norm(self.args()?)),
            "pow" => {
                self.expect('(')?;
                let base = self.expr()?;
                self.expect(',')?;
                let epos = self.pos();
                let e = self.expr()?;
                self.expect(')')?;
                let p = e
                    .eval(Binding::default())
                    .map_err(|_| ExprError::Syntax { pos: epos, msg: "exponent must be a finite constant".into() })?;
                Ok(base.powf(p))
            }
            _ => {
                if let Some(digits) = name.strip_prefix('t') {
                    if let Ok(index) = digits.parse::<usize>() {
                        if index == 0 || index > self.arity {
                            return Err(ExprError::Arity { pos, index, arity: self.arity });
                        }
                        return Ok(Expr::Var(index - 1));
                    }
                }
                Err(ExprError::Syntax { pos, msg: format!("unknown identifier '{name}'") })
            }
        }
    }
}

/// Parse `text` with variables `t1..tn` (and `r`) allowed.
pub fn parse(text: &str, n: usize) -> Result<Expr, ExprError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ExprError::Syntax { pos: 0, msg: "empty expression".into() });
    }
    let mut p = Parser { toks, idx: 0, arity: n, end: text.len() };
    let e = p.expr()?;
    if p.idx != p.toks.len() {
        return Err(ExprError::Syntax { pos: p.pos(), msg: "trailing input".into() });
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    /// Parse with unbounded arity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s, usize::MAX)
    }
}

fn fmt_num(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c.is_sign_negative() {
        write!(f, "({c:?})")
    } else {
        write!(f, "{c:?}")
    }
}

fn fmt_list(f: &mut fmt::Formatter<'_>, es: &[Expr], sep: &str) -> fmt::Result {
    for (i, e) in es.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => fmt_num(f, *c),
            Expr::Var(i) => write!(f, "t{}", i + 1),
            Expr::Radius => f.write_str("r"),
            Expr::Sum(es) => {
                f.write_str("(")?;
                fmt_list(f, es, " + ")?;
                f.write_str(")")
            }
            Expr::Product(es) => {
                f.write_str("(")?;
                fmt_list(f, es, " * ")?;
                f.write_str(")")
            }
            Expr::Pow(b, p) => {
                write!(f, "pow({b}, ")?;
                fmt_num(f, *p)?;
                f.write_str(")")
            }
            Expr::Abs(e) => write!(f, "abs({e})"),
            Expr::Log(e) => write!(f, "log({e})"),
            Expr::Exp(e) => write!(f, "exp({e})"),
            Expr::Min(es) => {
                f.write_str("min(")?;
                fmt_list(f, es, ", ")?;
                f.write_str(")")
            }
            Expr::Affine { offset, slope, var } => {
                f.write_str("(")?;
                fmt_num(f, *offset)?;
                f.write_str(" + ")?;
                fmt_num(f, *slope)?;
                write!(f, "*t{})", var + 1)
            }
            Expr::Norm(es) => {
                f.write_str("norm1m(")?;
                fmt_list(f, es, ", ")?;
                f.write_str(")")
            }
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// `constant + sum_i weights[i] * log(1/t_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogFactor {
    pub constant: f64,
    pub weights: Vec<f64>,
}

impl LogFactor {
    fn eval(&self, t: &[f64]) -> f64 {
        self.constant + self.weights.iter().zip(t).map(|(w, x)| -w * x.ln()).sum::<f64>()
    }

    /// +1 / -1 when the factor has one sign on the open unit cube.
    fn sign_on_cube(&self) -> Option<f64> {
        if self.constant >= 0.0 && self.weights.iter().all(|w| *w >= 0.0) {
            Some(1.0)
        } else if self.constant <= 0.0 && self.weights.iter().all(|w| *w <= 0.0) {
            Some(-1.0)
        } else {
            None
        }
    }

    fn scaled(&self, s: f64) -> LogFactor {
        LogFactor { constant: self.constant * s, weights: self.weights.iter().map(|w| w * s).collect() }
    }
}

/// Exactly integrable families recognised by [`Expr::classify`]. All forms are
/// relative to the open unit cube `(0,1)^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum ClosedFormClass {
    Monomial {
        coeff: f64,
        exponents: Vec<f64>,
    },
    LogMonomial {
        coeff: f64,
        exponents: Vec<f64>,
        log_factors: Vec<LogFactor>,
    },
    /// `coeff * |(1 - t_v)_{v in vars}|^exponent`
    Riesz {
        coeff: f64,
        vars: Vec<usize>,
        exponent: f64,
    },
    General,
}

/// Closed-form value of an integral; `Divergent` encodes `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormValue {
    Finite(f64),
    Divergent,
}

impl ClosedFormClass {
    pub fn exponents(&self) -> Option<&[f64]> {
        match self {
            ClosedFormClass::Monomial { exponents, .. } | ClosedFormClass::LogMonomial { exponents, .. } => {
                Some(exponents)
            }
            _ => None,
        }
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        match self {
            ClosedFormClass::Monomial { coeff, exponents } => {
                coeff * exponents.iter().zip(t).map(|(a, x)| x.powf(*a)).product::<f64>()
            }
            ClosedFormClass::LogMonomial { coeff, exponents, log_factors } => {
                coeff
                    * exponents.iter().zip(t).map(|(a, x)| x.powf(*a)).product::<f64>()
                    * log_factors.iter().map(|l| l.eval(t)).product::<f64>()
            }
            ClosedFormClass::Riesz { coeff, vars, exponent } => {
                let s: f64 = vars.iter().map(|&v| (1.0 - t[v]).powi(2)).sum();
                coeff * s.sqrt().powf(*exponent)
            }
            ClosedFormClass::General => f64::NAN,
        }
    }

    /// Integral over `[0,1]^n`, when a closed form exists.
    pub fn unit_cube_integral(&self) -> Option<ClosedFormValue> {
        match self {
            ClosedFormClass::Monomial { coeff, exponents } => Some(log_monomial_integral(*coeff, exponents, &[])),
            ClosedFormClass::LogMonomial { coeff, exponents, log_factors } => {
                Some(log_monomial_integral(*coeff, exponents, log_factors))
            }
            ClosedFormClass::Riesz { coeff, vars, exponent } if vars.len() == 1 => Some(if *coeff == 0.0 {
                ClosedFormValue::Finite(0.0)
            } else if *exponent <= -1.0 {
                ClosedFormValue::Divergent
            } else {
                ClosedFormValue::Finite(coeff / (exponent + 1.0))
            }),
            _ => None,
        }
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `int_{[0,1]^n} coeff * prod t_i^{a_i} * prod_k (c_k + sum_i w_ki log(1/t_i)) dt`,
/// by expanding the log factors into a polynomial in `L_i = log(1/t_i)` and
/// using `int_0^1 t^a L^j dt = j! / (a+1)^{j+1}`.
fn log_monomial_integral(coeff: f64, exponents: &[f64], logs: &[LogFactor]) -> ClosedFormValue {
    if coeff == 0.0 {
        return ClosedFormValue::Finite(0.0);
    }
    let n = exponents.len();
    let mut poly: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    poly.insert(vec![0; n], 1.0);
    for factor in logs {
        let mut next: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (idx, c) in &poly {
            if factor.constant != 0.0 {
                *next.entry(idx.clone()).or_insert(0.0) += c * factor.constant;
            }
            for (i, w) in factor.weights.iter().enumerate() {
                if *w != 0.0 {
                    let mut j = idx.clone();
                    j[i] += 1;
                    *next.entry(j).or_insert(0.0) += c * w;
                }
            }
        }
        poly = next;
    }
    poly.retain(|_, c| *c != 0.0);
    if poly.is_empty() {
        return ClosedFormValue::Finite(0.0);
    }
    if exponents.iter().any(|a| *a <= -1.0) {
        return ClosedFormValue::Divergent;
    }
    let mut total = 0.0;
    for (idx, c) in &poly {
        let mut term = *c;
        for (a, &j) in exponents.iter().zip(idx) {
            term *= factorial(j) / (a + 1.0).powi(j as i32 + 1);
        }
        total += term;
    }
    ClosedFormValue::Finite(coeff * total)
}

#[derive(Debug, Clone)]
struct LogMono {
    coeff: f64,
    exps: Vec<f64>,
    logs: Vec<LogFactor>,
}

impl LogMono {
    fn constant(c: f64, n: usize) -> Self {
        LogMono { coeff: c, exps: vec![0.0; n], logs: Vec::new() }
    }

    fn mul(mut self, other: LogMono) -> LogMono {
        self.coeff *= other.coeff;
        for (a, b) in self.exps.iter_mut().zip(&other.exps) {
            *a += b;
        }
        self.logs.extend(other.logs);
        self
    }
}

fn log_mono(e: &Expr, n: usize) -> Option<LogMono> {
    match e {
        Expr::Const(c) => Some(LogMono::constant(*c, n)),
        Expr::Var(i) => {
            let mut m = LogMono::constant(1.0, n);
            m.exps[*i] = 1.0;
            Some(m)
        }
        Expr::Affine { offset, slope, var } => {
            if *offset == 0.0 {
                let mut m = LogMono::constant(*slope, n);
                m.exps[*var] = 1.0;
                Some(m)
            } else if *slope == 0.0 {
                Some(LogMono::constant(*offset, n))
            } else {
                None
            }
        }
        Expr::Product(fs) => {
            let mut acc = LogMono::constant(1.0, n);
            for f in fs {
                acc = acc.mul(log_mono(f, n)?);
            }
            Some(acc)
        }
        Expr::Pow(b, p) => {
            let m = log_mono(b, n)?;
            if !m.logs.is_empty() {
                if is_integer(*p) && *p >= 0.0 && *p <= 8.0 {
                    let mut acc = LogMono::constant(1.0, n);
                    for _ in 0..(*p as usize) {
                        acc = acc.mul(m.clone());
                    }
                    return Some(acc);
                }
                return None;
            }
            if m.coeff < 0.0 && !is_integer(*p) {
                return None;
            }
            if m.coeff == 0.0 {
                return if *p > 0.0 { Some(LogMono::constant(0.0, n)) } else { None };
            }
            Some(LogMono { coeff: m.coeff.powf(*p), exps: m.exps.iter().map(|a| a * p).collect(), logs: Vec::new() })
        }
        Expr::Abs(inner) => {
            let m = log_mono(inner, n)?;
            let mut sign = 1.0;
            let mut logs = Vec::with_capacity(m.logs.len());
            for l in m.logs {
                let s = l.sign_on_cube()?;
                sign *= s;
                logs.push(l.scaled(s));
            }
            let _ = sign;
            Some(LogMono { coeff: m.coeff.abs(), exps: m.exps, logs })
        }
        Expr::Log(inner) => {
            let m = log_mono(inner, n)?;
            if !m.logs.is_empty() || m.coeff <= 0.0 {
                return None;
            }
            let mut out = LogMono::constant(1.0, n);
            out.logs.push(LogFactor { constant: m.coeff.ln(), weights: m.exps.iter().map(|a| -a).collect() });
            Some(out)
        }
        _ => None,
    }
}

fn riesz(e: &Expr) -> Option<(f64, Vec<usize>, f64)> {
    match e {
        Expr::Pow(b, a) => {
            let Expr::Norm(args) = b.as_ref() else { return None };
            let mut vars = Vec::new();
            for arg in args {
                match arg {
                    Expr::Affine { offset, slope, var } if *offset == 1.0 && *slope == -1.0 && !vars.contains(var) => {
                        vars.push(*var)
                    }
                    _ => return None,
                }
            }
            Some((1.0, vars, *a))
        }
        Expr::Norm(_) => riesz(&Expr::Pow(Box::new(e.clone()), 1.0)),
        Expr::Product(fs) => {
            let mut coeff = 1.0;
            let mut found = None;
            for f in fs {
                match f {
                    Expr::Const(c) => coeff *= c,
                    other => {
                        if found.is_some() {
                            return None;
                        }
                        found = Some(riesz(other)?);
                    }
                }
            }
            let (c, vars, a) = found?;
            Some((c * coeff, vars, a))
        }
        _ => None,
    }
}

impl Expr {
    /// Most specific closed-form class, for `n` integration variables.
    pub fn classify(&self, n: usize) -> ClosedFormClass {
        let n = n.max(self.arity());
        if self.uses_radius() {
            return ClosedFormClass::General;
        }
        if let Some(m) = log_mono(self, n) {
            return if m.logs.is_empty() {
                ClosedFormClass::Monomial { coeff: m.coeff, exponents: m.exps }
            } else {
                ClosedFormClass::LogMonomial { coeff: m.coeff, exponents: m.exps, log_factors: m.logs }
            };
        }
        if let Some((coeff, vars, exponent)) = riesz(self) {
            return ClosedFormClass::Riesz { coeff, vars, exponent };
        }
        ClosedFormClass::General
    }

    /// `Some((c, a))` when the expression equals `c * r^a` for `r > 0`.
    pub fn radial_power(&self) -> Option<(f64, f64)> {
        match self {
            Expr::Const(c) => Some((*c, 0.0)),
            Expr::Radius => Some((1.0, 1.0)),
            Expr::Product(fs) => {
                let mut c = 1.0;
                let mut a = 0.0;
                for f in fs {
                    let (cf, af) = f.radial_power()?;
                    c *= cf;
                    a += af;
                }
                Some((c, a))
            }
            Expr::Pow(b, p) => {
                let (c, a) = b.radial_power()?;
                if c < 0.0 && !is_integer(*p) || c == 0.0 && *p <= 0.0 {
                    return None;
                }
                Some((c.powf(*p), a * p))
            }
            Expr::Abs(b) => b.radial_power().map(|(c, a)| (c.abs(), a)),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Local asymptotics
// ---------------------------------------------------------------------------

/// Which variable an asymptote refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRef {
    T(usize),
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Zero,
    One,
    Infinity,
}

/// Local behaviour `sign * rho^exponent * log(1/rho)^log_power` as the chosen
/// variable approaches an endpoint, with `rho = t`, `1 - t` or (at infinity)
/// `rho = t` growing. `sign == 0` marks an identically zero expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote {
    pub exponent: f64,
    pub log_power: f64,
    pub sign: f64,
}

impl Asymptote {
    const BOUNDED: Asymptote = Asymptote { exponent: 0.0, log_power: 0.0, sign: 1.0 };

    fn zero() -> Asymptote {
        Asymptote { exponent: 0.0, log_power: 0.0, sign: 0.0 }
    }

    fn clean(mut self) -> Asymptote {
        if self.exponent.is_nan() {
            self.exponent = 0.0;
        }
        if self.log_power.is_nan() {
            self.log_power = 0.0;
        }
        self
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl Expr {
    /// Syntactic estimate of the local power behaviour; used for quadrature
    /// grading only, never for correctness decisions.
    pub fn asymptote(&self, v: VarRef, at: Endpoint) -> Asymptote {
        self.asym(v, at).clean()
    }

    fn is_var(&self, v: VarRef) -> bool {
        matches!((self, v), (Expr::Var(i), VarRef::T(j)) if *i == j) || matches!((self, v), (Expr::Radius, VarRef::R))
    }

    fn asym(&self, v: VarRef, at: Endpoint) -> Asymptote {
        use Endpoint::*;
        let vanishing = |sign: f64| Asymptote { exponent: 1.0, log_power: 0.0, sign };
        match self {
            Expr::Const(c) => {
                if *c == 0.0 {
                    Asymptote::zero()
                } else {
                    Asymptote { sign: sgn(*c), ..Asymptote::BOUNDED }
                }
            }
            Expr::Var(_) | Expr::Radius => {
                if self.is_var(v) {
                    match at {
                        Zero | Infinity => vanishing(1.0),
                        One => Asymptote::BOUNDED,
                    }
                } else {
                    Asymptote::BOUNDED
                }
            }
            Expr::Affine { offset, slope, var } => {
                if v != VarRef::T(*var) {
                    let mid = offset + 0.5 * slope;
                    return Asymptote { sign: if mid == 0.0 { 1.0 } else { sgn(mid) }, ..Asymptote::BOUNDED };
                }
                match at {
                    Zero if *offset == 0.0 => vanishing(sgn(*slope)),
                    Zero => Asymptote { sign: sgn(*offset), ..Asymptote::BOUNDED },
                    One if offset + slope == 0.0 => vanishing(sgn(-slope)),
                    One => Asymptote { sign: sgn(offset + slope), ..Asymptote::BOUNDED },
                    Infinity if *slope != 0.0 => vanishing(sgn(*slope)),
                    Infinity => Asymptote { sign: sgn(*offset), ..Asymptote::BOUNDED },
                }
            }
            Expr::Sum(ts) => {
                let mut best: Option<Asymptote> = None;
                for t in ts {
                    let a = t.asym(v, at);
                    if a.sign == 0.0 {
                        continue;
                    }
                    best = Some(match best {
                        None => a,
                        Some(b) => {
                            let dominates = match at {
                                Zero | One => {
                                    a.exponent < b.exponent || a.exponent == b.exponent && a.log_power > b.log_power
                                }
                                Infinity => {
                                    a.exponent > b.exponent || a.exponent == b.exponent && a.log_power > b.log_power
                                }
                            };
                            if dominates {
                                a
                            } else {
                                b
                            }
                        }
                    });
                }
                best.unwrap_or_else(Asymptote::zero)
            }
            Expr::Product(fs) => {
                let mut acc = Asymptote::BOUNDED;
                for f in fs {
                    let a = f.asym(v, at);
                    if a.sign == 0.0 {
                        return Asymptote::zero();
                    }
                    acc.exponent += a.exponent;
                    acc.log_power += a.log_power;
                    acc.sign *= a.sign;
                }
                acc
            }
            Expr::Pow(b, p) => {
                let a = b.asym(v, at);
                if a.sign == 0.0 {
                    return if *p > 0.0 { Asymptote::zero() } else { Asymptote::BOUNDED };
                }
                let sign = if a.sign < 0.0 && is_integer(*p) && (*p as i64) % 2 != 0 { -1.0 } else { 1.0 };
                Asymptote { exponent: a.exponent * p, log_power: a.log_power * p, sign }
            }
            Expr::Abs(e) => {
                let a = e.asym(v, at);
                Asymptote { sign: a.sign.abs(), ..a }
            }
            Expr::Log(e) => {
                let a = e.asym(v, at);
                match at {
                    Zero | One if a.exponent != 0.0 => {
                        Asymptote { exponent: 0.0, log_power: 1.0, sign: -sgn(a.exponent) }
                    }
                    Infinity if a.exponent != 0.0 => {
                        Asymptote { exponent: 0.0, log_power: -1.0, sign: sgn(a.exponent) }
                    }
                    _ => Asymptote::BOUNDED,
                }
            }
            Expr::Exp(e) => {
                let a = e.asym(v, at);
                let blows = match at {
                    Zero | One => a.exponent < 0.0,
                    Infinity => a.exponent > 0.0,
                };
                if !blows || a.sign == 0.0 {
                    return Asymptote::BOUNDED;
                }
                let decays = a.sign < 0.0;
                let exponent = match (at, decays) {
                    (Zero | One, true) => f64::INFINITY,
                    (Zero | One, false) => f64::NEG_INFINITY,
                    (Infinity, true) => f64::NEG_INFINITY,
                    (Infinity, false) => f64::INFINITY,
                };
                Asymptote { exponent, log_power: 0.0, sign: 1.0 }
            }
            Expr::Min(es) => {
                let all: Vec<Asymptote> = es.iter().map(|e| e.asym(v, at)).collect();
                let pick = match at {
                    Zero | One => all.iter().copied().max_by(|x, y| x.exponent.total_cmp(&y.exponent)),
                    Infinity => all.iter().copied().min_by(|x, y| x.exponent.total_cmp(&y.exponent)),
                };
                pick.unwrap_or(Asymptote::BOUNDED)
            }
            Expr::Norm(es) => {
                let all: Vec<Asymptote> = es.iter().map(|e| e.asym(v, at)).collect();
                if at == Infinity {
                    let e = all.iter().map(|a| a.exponent).fold(0.0, f64::max);
                    return Asymptote { exponent: e, log_power: 0.0, sign: 1.0 };
                }
                // Corner singularity: every argument vanishes at this face of
                // its own variable. Spread the order over the arguments.
                let corner = es.iter().all(|arg| match arg {
                    Expr::Affine { offset, slope, .. } => match at {
                        One => offset + slope == 0.0,
                        _ => *offset == 0.0,
                    },
                    Expr::Var(_) => at == Zero,
                    _ => false,
                });
                if corner {
                    let here = all.iter().map(|a| a.exponent).fold(0.0, f64::max);
                    return Asymptote { exponent: here / es.len() as f64, log_power: 0.0, sign: 1.0 };
                }
                let e = all.iter().map(|a| a.exponent).fold(f64::INFINITY, f64::min);
                Asymptote { exponent: if e.is_finite() { e } else { 0.0 }, log_power: 0.0, sign: 1.0 }
            }
        }
    }
}
