//! The profile function phi of an (alpha, beta)-metric `F = alpha * phi(beta / alpha)`.
//!
//! Expressions in the single variable `s` are parsed from text, evaluated,
//! and differentiated symbolically. Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' power)?
//! power  := integer | '-' integer | '(' '-'? integer ('/' integer)? ')'
//! base   := number | 's' | '(' expr ')' | func '(' expr ')'
//! func   := 'sqrt' | 'exp' | 'log'
//! ```

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Number of grid points used by [`regularity_check`].
pub const REGULARITY_GRID: usize = 2001;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: expected {}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
}

/// Evaluation left the domain of the expression.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("phi is undefined at s = {s}")]
pub struct DomainError {
    pub s: f64,
}

/// Rational exponent `num / den` with `den > 0` and the fraction reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exponent {
    num: i64,
    den: i64,
}

impl Exponent {
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Some(Self { num: sign * num / g.max(1), den: sign * den / g.max(1) })
    }

    pub fn integer(n: i64) -> Self {
        Self { num: n, den: 1 }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn minus_one(self) -> Self {
        Self::new(self.num - self.den, self.den).expect("den > 0")
    }

    fn is_integer(self) -> bool {
        self.den == 1
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Expression tree for phi.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiExpr {
    Const(f64),
    Var,
    Neg(Box<PhiExpr>),
    Add(Box<PhiExpr>, Box<PhiExpr>),
    Sub(Box<PhiExpr>, Box<PhiExpr>),
    Mul(Box<PhiExpr>, Box<PhiExpr>),
    Div(Box<PhiExpr>, Box<PhiExpr>),
    Pow(Box<PhiExpr>, Exponent),
    Sqrt(Box<PhiExpr>),
    Exp(Box<PhiExpr>),
    Log(Box<PhiExpr>),
}

use PhiExpr::*;

impl PhiExpr {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut p = Parser { src: text.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error(&["operator", "end of input"]));
        }
        Ok(e)
    }

    /// `phi(s) = 1`.
    pub fn riemannian() -> Self {
        Const(1.0)
    }

    /// `phi(s) = 1 + s`.
    pub fn randers() -> Self {
        add(Const(1.0), Var)
    }

    /// `phi(s) = 1 / s`.
    pub fn kropina() -> Self {
        div(Const(1.0), Var)
    }

    pub fn eval(&self, s: f64) -> Result<f64, DomainError> {
        let v = self.eval_raw(s).ok_or(DomainError { s })?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(DomainError { s })
        }
    }

    fn eval_raw(&self, s: f64) -> Option<f64> {
        let v = match self {
            Const(c) => *c,
            Var => s,
            Neg(a) => -a.eval_raw(s)?,
            Add(a, b) => a.eval_raw(s)? + b.eval_raw(s)?,
            Sub(a, b) => a.eval_raw(s)? - b.eval_raw(s)?,
            Mul(a, b) => a.eval_raw(s)? * b.eval_raw(s)?,
            Div(a, b) => {
                let d = b.eval_raw(s)?;
                if d == 0.0 {
                    return None;
                }
                a.eval_raw(s)? / d
            }
            Pow(a, e) => {
                let base = a.eval_raw(s)?;
                if base == 0.0 && e.num < 0 {
                    return None;
                }
                if e.is_integer() {
                    base.powi(e.num as i32)
                } else if base < 0.0 {
                    return None;
                } else {
                    base.powf(e.value())
                }
            }
            Sqrt(a) => {
                let x = a.eval_raw(s)?;
                if x < 0.0 {
                    return None;
                }
                x.sqrt()
            }
            Exp(a) => a.eval_raw(s)?.exp(),
            Log(a) => {
                let x = a.eval_raw(s)?;
                if x <= 0.0 {
                    return None;
                }
                x.ln()
            }
        };
        v.is_finite().then_some(v)
    }

    /// Symbolic derivative with respect to `s`, lightly simplified.
    pub fn derivative(&self) -> PhiExpr {
        match self {
            Const(_) => Const(0.0),
            Var => Const(1.0),
            Neg(a) => neg(a.derivative()),
            Add(a, b) => add(a.derivative(), b.derivative()),
            Sub(a, b) => sub(a.derivative(), b.derivative()),
            Mul(a, b) => add(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative())),
            Div(a, b) => div(
                sub(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative())),
                pow((**b).clone(), Exponent::integer(2)),
            ),
            Pow(a, e) => mul(
                mul(Const(e.value()), pow((**a).clone(), e.minus_one())),
                a.derivative(),
            ),
            Sqrt(a) => div(a.derivative(), mul(Const(2.0), Sqrt(a.clone()))),
            Exp(a) => mul(Exp(a.clone()), a.derivative()),
            Log(a) => div(a.derivative(), (**a).clone()),
        }
    }

    /// `(phi', phi'')`.
    pub fn derivatives(&self) -> (PhiExpr, PhiExpr) {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        (d1, d2)
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self {
            Const(c) => Some(*c),
            _ => None,
        }
    }
}

fn add(a: PhiExpr, b: PhiExpr) -> PhiExpr {
    match (a.is_constant(), b.is_constant()) {
        (Some(x), Some(y)) => Const(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: PhiExpr, b: PhiExpr) -> PhiExpr {
    match (a.is_constant(), b.is_constant()) {
        (Some(x), Some(y)) => Const(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: PhiExpr, b: PhiExpr) -> PhiExpr {
    match (a.is_constant(), b.is_constant()) {
        (Some(x), Some(y)) => Const(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Const(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        _ => Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: PhiExpr, b: PhiExpr) -> PhiExpr {
    match (a.is_constant(), b.is_constant()) {
        (Some(x), _) if x == 0.0 => Const(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: PhiExpr) -> PhiExpr {
    match a {
        Const(c) => Const(-c),
        Neg(inner) => *inner,
        other => Neg(Box::new(other)),
    }
}

fn pow(a: PhiExpr, e: Exponent) -> PhiExpr {
    if e.num == 0 {
        return Const(1.0);
    }
    if e == Exponent::integer(1) {
        return a;
    }
    match a {
        Const(c) if e.is_integer() => Const(c.powi(e.num as i32)),
        other => Pow(Box::new(other), e),
    }
}

impl fmt::Display for PhiExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const(c) => {
                if *c < 0.0 {
                    write!(f, "(-{})", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Var => write!(f, "s"),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "{a} * {b}"),
            Div(a, b) => write!(f, "{a} / ({b})"),
            Pow(a, e) => {
                if e.is_integer() && e.num > 0 {
                    write!(f, "({a})^{}", e.num)
                } else if e.is_integer() {
                    write!(f, "({a})^({})", e.num)
                } else {
                    write!(f, "({a})^({}/{})", e.num, e.den)
                }
            }
            Sqrt(a) => write!(f, "sqrt({a})"),
            Exp(a) => write!(f, "exp({a})"),
            Log(a) => write!(f, "log({a})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError { offset: self.pos, expected: expected.iter().map(|s| s.to_string()).collect() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&[&format!("'{}'", c as char)]))
        }
    }

    fn expr(&mut self) -> Result<PhiExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<PhiExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<PhiExpr, ParseError> {
        if self.eat(b'-') {
            return Ok(Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.eat(b'^') {
            let e = self.power()?;
            return Ok(Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn power(&mut self) -> Result<Exponent, ParseError> {
        if self.eat(b'(') {
            let neg = self.eat(b'-');
            let num = self.integer()?;
            let den = if self.eat(b'/') { self.integer()? } else { 1 };
            let at = self.pos;
            self.expect(b')')?;
            let num = if neg { -num } else { num };
            Exponent::new(num, den).ok_or(ParseError { offset: at, expected: vec!["nonzero denominator".into()] })
        } else {
            let neg = self.eat(b'-');
            let n = self.integer()?;
            Ok(Exponent::integer(if neg { -n } else { n }))
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(&["integer"]));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| ParseError { offset: start, expected: vec!["integer that fits in 64 bits".into()] })
    }

    fn base(&mut self) -> Result<PhiExpr, ParseError> {
        const EXPECTED: &[&str] = &["number", "'s'", "'('", "sqrt", "exp", "log"];
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let ctor: fn(Box<PhiExpr>) -> PhiExpr = match word {
                    "s" => return Ok(Var),
                    "sqrt" => Sqrt,
                    "exp" => Exp,
                    "log" => Log,
                    _ => {
                        self.pos = start;
                        return Err(self.error(EXPECTED));
                    }
                };
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(ctor(Box::new(arg)))
            }
            _ => Err(self.error(EXPECTED)),
        }
    }

    fn number(&mut self) -> Result<PhiExpr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos > s
        };
        let int_part = digits(self);
        let mut frac_part = false;
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            frac_part = digits(self);
        }
        if !int_part && !frac_part {
            self.pos = start;
            return Err(self.error(&["number"]));
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if !digits(self) {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Const)
            .map_err(|_| ParseError { offset: start, expected: vec!["number".into()] })
    }
}

/// Result of sampling the regularity condition
/// `phi(s) - s phi'(s) + (b^2 - s^2) phi''(s) > 0` on `[-b, b]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub b: f64,
    pub regular: bool,
    /// Grid points where the condition fails or phi is undefined.
    pub singular_at: Vec<f64>,
    /// Subset of `singular_at` where phi or a derivative is undefined.
    pub undefined_at: Vec<f64>,
}

/// Samples the regularity condition on a uniform grid of
/// [`REGULARITY_GRID`] points over `[-b, b]`.
pub fn regularity_check(phi: &PhiExpr, b: f64) -> Result<RegularityReport, crate::Error> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(crate::Error::InvalidInput(format!("regularity bound b must be positive, got {b}")));
    }
    let (d1, d2) = phi.derivatives();
    let mut singular_at = Vec::new();
    let mut undefined_at = Vec::new();
    let last = (REGULARITY_GRID - 1) as f64;
    for k in 0..REGULARITY_GRID {
        let s = -b + 2.0 * b * (k as f64) / last;
        let value = phi
            .eval(s)
            .and_then(|p| Ok((p, d1.eval(s)?, d2.eval(s)?)))
            .map(|(p, p1, p2)| p - s * p1 + (b * b - s * s) * p2);
        match value {
            Ok(v) if v > 0.0 => {}
            Ok(_) => singular_at.push(s),
            Err(_) => {
                singular_at.push(s);
                undefined_at.push(s);
            }
        }
    }
    Ok(RegularityReport { b, regular: singular_at.is_empty(), singular_at, undefined_at })
}
