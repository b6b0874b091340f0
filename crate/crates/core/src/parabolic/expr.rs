//! Coefficient expressions in `x` and `t`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" unary)?
//! primary := number | "x" | "t" | "pi" | func "(" expr ")" | "(" expr ")"
//! func    := "sin" | "cos" | "exp" | "sqrt"
//! ```
//!
//! So `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("parse error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("expression {expr:?} is not finite at x = {x}, t = {t}")]
pub struct EvalError {
    pub expr: String,
    pub x: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    X,
    T,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::X => x,
            Node::T => t,
            Node::Neg(a) => -a.eval(x, t),
            Node::Add(a, b) => a.eval(x, t) + b.eval(x, t),
            Node::Sub(a, b) => a.eval(x, t) - b.eval(x, t),
            Node::Mul(a, b) => a.eval(x, t) * b.eval(x, t),
            Node::Div(a, b) => a.eval(x, t) / b.eval(x, t),
            Node::Pow(a, b) => a.eval(x, t).powf(b.eval(x, t)),
            Node::Call(f, a) => {
                let v = a.eval(x, t);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    fn uses_t(&self) -> bool {
        match self {
            Node::T => true,
            Node::Num(_) | Node::X => false,
            Node::Neg(a) | Node::Call(_, a) => a.uses_t(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                a.uses_t() || b.uses_t()
            }
        }
    }
}

/// A parsed coefficient `g(x, t)`.
#[derive(Clone, PartialEq)]
pub struct Coefficient {
    source: String,
    root: Node,
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coefficient({:?})", self.source)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for Coefficient {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_coefficient(s)
    }
}

impl Coefficient {
    pub fn constant(v: f64) -> Self {
        Coefficient { source: format!("{v:?}"), root: Node::Num(v) }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Raw evaluation; may return non-finite values.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.root.eval(x, t)
    }

    pub fn try_eval(&self, x: f64, t: f64) -> Result<f64, EvalError> {
        let v = self.root.eval(x, t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError { expr: self.source.clone(), x, t })
        }
    }

    /// Evaluates on every grid point, failing at the first non-finite value.
    pub fn check_grid(&self, xs: &[f64], ts: &[f64]) -> Result<(), EvalError> {
        for &t in ts {
            for &x in xs {
                self.try_eval(x, t)?;
            }
        }
        Ok(())
    }

    pub fn depends_on_t(&self) -> bool {
        self.root.uses_t()
    }
}

pub fn parse_coefficient(src: &str) -> Result<Coefficient, ParseError> {
    let mut p = Parser { src, pos: 0 };
    p.skip_ws();
    let root = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(Coefficient { source: src.to_string(), root })
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

const OPERAND: &[&str] = &["number", "x", "t", "pi", "function", "\"(\"", "\"-\""];

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        let found = match self.rest().chars().next() {
            None => "end of input".to_string(),
            Some(_) => {
                let tok: String = self.rest().chars().take(8).collect();
                format!("{tok:?}")
            }
        };
        ParseError { offset: self.pos, expected: expected.to_vec(), found }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            return Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some('(') => {
                self.eat('(');
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error(&["\")\"", "operator"]));
                }
                Ok(e)
            }
            _ => Err(self.error(OPERAND)),
        }
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        match self.src[start..end].parse::<f64>() {
            Ok(v) => {
                self.pos = end;
                self.skip_ws();
                Ok(Node::Num(v))
            }
            Err(_) => Err(self.error(&["number"])),
        }
    }

    fn ident(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        let name = &self.src[start..start + len];
        let func = match name {
            "x" | "t" | "pi" => None,
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => return Err(self.error(&["x", "t", "pi", "sin", "cos", "exp", "sqrt"])),
        };
        self.pos += len;
        self.skip_ws();
        match func {
            None => Ok(match name {
                "x" => Node::X,
                "t" => Node::T,
                _ => Node::Num(std::f64::consts::PI),
            }),
            Some(f) => {
                if !self.eat('(') {
                    return Err(self.error(&["\"(\""]));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error(&["\")\"", "operator"]));
                }
                Ok(Node::Call(f, Box::new(arg)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64, t: f64) -> f64 {
        parse_coefficient(s).unwrap().eval(x, t)
    }

    #[test]
    fn constants_and_spec_example() {
        assert_eq!(ev("1", 0.3, 0.7), 1.0);
        assert!((ev("2 + sin(pi*x)*t", 0.5, 1.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("1 + 2 * 3", 0.0, 0.0), 7.0);
        assert_eq!(ev("-x^2", 3.0, 0.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(ev("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(ev("8 / 4 / 2", 0.0, 0.0), 1.0);
        assert_eq!(ev("1 - 2 - 3", 0.0, 0.0), -4.0);
        assert_eq!(ev("--x", 2.0, 0.0), 2.0);
        assert_eq!(ev("(1+2)*t", 0.0, 2.0), 6.0);
        assert_eq!(ev("1.5e1 + .5", 0.0, 0.0), 15.5);
        assert_eq!(ev("sqrt(4)*exp(0)*cos(0)", 0.0, 0.0), 2.0);
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let e = parse_coefficient("1 + * 2").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.expected.contains(&"number"));
        let e = parse_coefficient("sin x").unwrap_err();
        assert_eq!(e.offset, 4);
        let e = parse_coefficient("(1 + 2").unwrap_err();
        assert_eq!(e.offset, 6);
        assert_eq!(e.found, "end of input");
        let e = parse_coefficient("y + 1").unwrap_err();
        assert_eq!(e.offset, 0);
        assert!(parse_coefficient("").is_err());
        assert!(parse_coefficient("1 2").is_err());
    }

    #[test]
    fn pole_detected_on_grid() {
        let c = parse_coefficient("1/(1-x)").unwrap();
        let xs: Vec<f64> = (0..=4).map(|i| i as f64 / 4.0).collect();
        let err = c.check_grid(&xs, &[0.0]).unwrap_err();
        assert_eq!((err.x, err.t), (1.0, 0.0));
        assert!(c.check_grid(&xs[..4], &[0.0]).is_ok());
    }

    #[test]
    fn time_dependence() {
        assert!(parse_coefficient("x*t").unwrap().depends_on_t());
        assert!(!parse_coefficient("sin(pi*x)").unwrap().depends_on_t());
    }
}
