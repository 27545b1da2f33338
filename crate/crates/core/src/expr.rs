//! A small expression language for operator identities.
//!
//! Relations between monodromy entries and symmetry generators are stored as
//! text (`"B(u)B(v) = B(v)B(u)"`) and evaluated against concrete matrices, so
//! each stored line can be read side by side with its printed source.
//!
//! Grammar (whitespace is ignored, juxtaposition is multiplication):
//!
//! ```text
//! relation := expr '=' expr
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := power ('*'? power)*
//! power    := atom ('^' integer)?
//! atom     := number | 'xi' | 'alpha(' arg ',' arg ')' | 'beta(' arg ',' arg ')'
//!           | 'd(' arg ')' | ('A'|'B'|'C'|'D') '(' arg ')' | 'E' | 'G' | 'Einv'
//!           | '(' expr ')'
//! arg      := 'u' | 'v'
//! ```
//!
//! Operators never commute: factors are multiplied in written order.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::tensor::{c64, ComplexMatrix, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arg {
    U,
    V,
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arg::U => "u",
            Arg::V => "v",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Xi,
    Alpha(Arg, Arg),
    Beta(Arg, Arg),
    VacuumD(Arg),
    /// Monodromy entry `A..D` at an argument, or a bare generator (`E`, `G`, `Einv`).
    Op(String, Option<Arg>),
    Neg(Box<Expr>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, u32),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(x) => write!(f, "{x}"),
            Expr::Xi => f.write_str("xi"),
            Expr::Alpha(a, b) => write!(f, "alpha({a},{b})"),
            Expr::Beta(a, b) => write!(f, "beta({a},{b})"),
            Expr::VacuumD(a) => write!(f, "d({a})"),
            Expr::Op(name, Some(a)) => write!(f, "{name}({a})"),
            Expr::Op(name, None) => f.write_str(name),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Sum(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "({})", parts.join(" + "))
            }
            Expr::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|t| t.to_string()).collect();
                f.write_str(&parts.join(" "))
            }
            Expr::Power(e, k) => write!(f, "{e}^{k}"),
        }
    }
}

/// A parsed identity `lhs = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub lhs: Expr,
    pub rhs: Expr,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_alphabetic() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        self.src[start..self.pos].to_string()
    }

    fn arg(&mut self) -> Result<Arg> {
        match self.ident().as_str() {
            "u" => Ok(Arg::U),
            "v" => Ok(Arg::V),
            other => self.err(format!("unknown argument '{other}'")),
        }
    }

    fn arg_pair(&mut self) -> Result<(Arg, Arg)> {
        self.expect('(')?;
        let a = self.arg()?;
        self.expect(',')?;
        let b = self.arg()?;
        self.expect(')')?;
        Ok((a, b))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut negate = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        loop {
            let t = self.term()?;
            terms.push(if negate { Expr::Neg(Box::new(t)) } else { t });
            if self.eat('+') {
                negate = false;
            } else if self.eat('-') {
                negate = true;
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn starts_atom(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c == '(' || c.is_ascii_digit() || c.is_alphabetic())
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.power()?];
        loop {
            if self.eat('*') || self.starts_atom() {
                factors.push(self.power()?);
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Product(factors) })
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let k: u32 = self.src[start..self.pos]
                .parse()
                .or_else(|_| self.err("expected integer exponent"))?;
            return Ok(Expr::Power(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                let x: f64 = self.src[start..self.pos]
                    .parse()
                    .or_else(|_| self.err("bad number"))?;
                Ok(Expr::Number(x))
            }
            Some(c) if c.is_alphabetic() => {
                let name = self.ident();
                match name.as_str() {
                    "xi" | "ξ" => Ok(Expr::Xi),
                    "alpha" | "α" => {
                        let (a, b) = self.arg_pair()?;
                        Ok(Expr::Alpha(a, b))
                    }
                    "beta" | "β" => {
                        let (a, b) = self.arg_pair()?;
                        Ok(Expr::Beta(a, b))
                    }
                    "d" => {
                        self.expect('(')?;
                        let a = self.arg()?;
                        self.expect(')')?;
                        Ok(Expr::VacuumD(a))
                    }
                    "A" | "B" | "C" | "D" => {
                        self.expect('(')?;
                        let a = self.arg()?;
                        self.expect(')')?;
                        Ok(Expr::Op(name, Some(a)))
                    }
                    "E" | "G" | "Einv" => Ok(Expr::Op(name, None)),
                    other => self.err(format!("unknown symbol '{other}'")),
                }
            }
            other => self.err(format!("unexpected {other:?}")),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

pub fn parse_relation(src: &str) -> Result<Relation> {
    let mut parts = src.split('=');
    let (Some(l), Some(r), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Parse {
            pos: 0,
            msg: "relation must contain exactly one '='".into(),
        });
    };
    let lhs = parse_expr(l)?;
    let rhs = parse_expr(r).map_err(|e| match e {
        Error::Parse { pos, msg } => Error::Parse {
            pos: pos + l.len() + 1,
            msg,
        },
        other => other,
    })?;
    Ok(Relation { lhs, rhs })
}

/// Values bound to the symbols of an expression.
pub struct Env<'a> {
    pub xi: c64,
    pub eta: c64,
    pub u: c64,
    pub v: c64,
    /// Per-site vacuum factor exponent for `d(x) = (1 − η/x)^N`.
    pub n_sites: usize,
    pub dim: usize,
    pub ops: HashMap<(String, Option<Arg>), &'a ComplexMatrix>,
}

impl<'a> Env<'a> {
    fn value_of(&self, a: Arg) -> c64 {
        match a {
            Arg::U => self.u,
            Arg::V => self.v,
        }
    }

    pub fn alpha(&self, a: Arg, b: Arg) -> c64 {
        ONE + self.beta(a, b)
    }

    pub fn beta(&self, a: Arg, b: Arg) -> c64 {
        -self.eta / (self.value_of(a) - self.value_of(b))
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Scalar(c64),
    Op(ComplexMatrix),
}

impl Value {
    fn into_matrix(self, dim: usize) -> ComplexMatrix {
        match self {
            Value::Scalar(z) => ComplexMatrix::identity(dim).scale(z),
            Value::Op(m) => m,
        }
    }

    fn mul(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a * b),
            (Value::Scalar(a), Value::Op(m)) | (Value::Op(m), Value::Scalar(a)) => Value::Op(m.scale(a)),
            (Value::Op(a), Value::Op(b)) => Value::Op(a.matmul(&b)),
        }
    }

    fn add(self, rhs: Value, dim: usize) -> Value {
        match (self, rhs) {
            (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a + b),
            (a, b) => Value::Op(&a.into_matrix(dim) + &b.into_matrix(dim)),
        }
    }

    fn neg(self) -> Value {
        match self {
            Value::Scalar(a) => Value::Scalar(-a),
            Value::Op(m) => Value::Op(m.scale(-ONE)),
        }
    }
}

pub fn eval(e: &Expr, env: &Env<'_>) -> Result<Value> {
    Ok(match e {
        Expr::Number(x) => Value::Scalar(c64::new(*x, 0.0)),
        Expr::Xi => Value::Scalar(env.xi),
        Expr::Alpha(a, b) => Value::Scalar(env.alpha(*a, *b)),
        Expr::Beta(a, b) => Value::Scalar(env.beta(*a, *b)),
        Expr::VacuumD(a) => {
            let x = env.value_of(*a);
            Value::Scalar((ONE - env.eta / x).powu(env.n_sites as u32))
        }
        Expr::Op(name, arg) => {
            let m = env
                .ops
                .get(&(name.clone(), *arg))
                .ok_or_else(|| Error::InvalidParameter(format!("no binding for {e}")))?;
            Value::Op((*m).clone())
        }
        Expr::Neg(inner) => eval(inner, env)?.neg(),
        Expr::Sum(ts) => {
            let mut acc = Value::Scalar(c64::new(0.0, 0.0));
            for t in ts {
                acc = acc.add(eval(t, env)?, env.dim);
            }
            acc
        }
        Expr::Product(fs) => {
            let mut acc = Value::Scalar(ONE);
            for f in fs {
                acc = acc.mul(eval(f, env)?);
            }
            acc
        }
        Expr::Power(base, k) => {
            let b = eval(base, env)?;
            let mut acc = Value::Scalar(ONE);
            for _ in 0..*k {
                acc = acc.mul(b.clone());
            }
            acc
        }
    })
}

/// Evaluates both sides; returns `(lhs, rhs)` as matrices.
pub fn eval_relation(rel: &Relation, env: &Env<'_>) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let lhs = eval(&rel.lhs, env)?.into_matrix(env.dim);
    let rhs = eval(&rel.rhs, env)?.into_matrix(env.dim);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::pauli;

    fn env_with<'a>(ops: &[(&str, Option<Arg>, &'a ComplexMatrix)]) -> Env<'a> {
        Env {
            xi: c64::new(2.0, 0.0),
            eta: ONE,
            u: c64::new(3.0, 0.0),
            v: c64::new(1.0, 0.0),
            n_sites: 1,
            dim: 2,
            ops: ops.iter().map(|(n, a, m)| ((n.to_string(), *a), *m)).collect(),
        }
    }

    #[test]
    fn parses_displayed_relation() {
        let r = parse_relation("A(u)C(v) = alpha(u,v)C(v)A(u) - (beta(u,v)C(u) - xi A(u))A(v) - xi D(v)A(u) + (xi C(v) + xi^2 D(v))B(u)").unwrap();
        assert!(matches!(r.lhs, Expr::Product(ref f) if f.len() == 2));
        assert!(matches!(r.rhs, Expr::Sum(ref t) if t.len() == 4));
    }

    #[test]
    fn operator_order_is_preserved() {
        let x = pauli::x();
        let z = pauli::z();
        let env = env_with(&[("A", Some(Arg::U), &x), ("B", Some(Arg::U), &z)]);
        let ab = eval(&parse_expr("A(u)B(u)").unwrap(), &env).unwrap().into_matrix(2);
        let ba = eval(&parse_expr("B(u)A(u)").unwrap(), &env).unwrap().into_matrix(2);
        assert_eq!(ab, x.matmul(&z));
        assert_eq!(ba, z.matmul(&x));
        assert_ne!(ab, ba);
    }

    #[test]
    fn scalars_and_identity_promotion() {
        let e = pauli::z();
        let env = env_with(&[("E", None, &e)]);
        // 1 - E^2 = 0 for E = σᶻ
        let v = eval(&parse_expr("xi (1 - E^2)").unwrap(), &env).unwrap().into_matrix(2);
        assert_eq!(v.max_abs(), 0.0);
        // alpha(u,v) = 1 - 1/(3-1) = 0.5, beta(v,u) = 0.5
        let s = eval(&parse_expr("alpha(u,v) + beta(v,u) - 1").unwrap(), &env).unwrap();
        assert!(matches!(s, Value::Scalar(z) if z.norm() < 1e-15));
    }

    #[test]
    fn parse_errors_carry_position() {
        assert!(matches!(parse_expr("A(w)"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("A(u) +"), Err(Error::Parse { .. })));
        assert!(parse_relation("A(u) = B(u) = C(u)").is_err());
        assert!(matches!(parse_expr("Q"), Err(Error::Parse { .. })));
    }

    #[test]
    fn missing_binding_is_an_error() {
        let env = env_with(&[]);
        assert!(eval(&parse_expr("G").unwrap(), &env).is_err());
    }
}
