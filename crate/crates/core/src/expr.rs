//! Arithmetic expressions for source terms h(x) and custom drift policies,
//! so problem instances are data rather than code.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr   = term { ("+" | "-") term } ;
//! term   = factor { ("*" | "/") factor } ;
//! factor = "-" factor | power ;
//! power  = atom [ "^" factor ] ;
//! atom   = number | name | name "(" expr { "," expr } ")" | "(" expr ")" ;
//! name   = variable x1..xN | "r" | "pi" | "e"
//!        | "sin" | "cos" | "exp" | "log" | "abs" | "min" | "max" ;
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus: `-x1^2`
//! parses as `-(x1^2)` and `2^3^2` as `2^(3^2)`. The variable `r` is the
//! Euclidean distance to the domain center, supplied at evaluation time.
//!
//! Evaluation either returns a finite real or an error; it never produces
//! NaN or infinity. A negative base with a non-integer exponent is an
//! evaluation error rather than NaN.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Min,
    Max,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

/// Parsed expression tree. Immutable and shareable; evaluation is reentrant.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 0-based axis index; `x1` parses to `Var(0)`.
    Var(usize),
    /// `r`, the distance |x - center|.
    Radius,
    Pi,
    E,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Parses `src` against `n_vars` axis variables (`x1` .. `x{n_vars}`).
pub fn parse(src: &str, n_vars: usize) -> Result<Expr> {
    if n_vars == 0 {
        return Err(Error::Config("expression needs n_vars >= 1".into()));
    }
    let mut p = Parser {
        src,
        bytes: src.as_bytes(),
        pos: 0,
        n_vars,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Evaluates at point `x`; `center` defines `r = |x - center|`.
pub fn eval(e: &Expr, x: &[f64], center: &[f64]) -> Result<f64> {
    let v = eval_inner(e, x, center)?;
    debug_assert!(v.is_finite());
    Ok(v)
}

fn eval_inner(e: &Expr, x: &[f64], center: &[f64]) -> Result<f64> {
    let finite = |v: f64, what: &str| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Eval(format!("{what} overflowed")))
        }
    };
    match e {
        Expr::Num(v) => Ok(*v),
        Expr::Var(i) => x.get(*i).copied().ok_or_else(|| {
            Error::Eval(format!("x{} evaluated at a {}-d point", i + 1, x.len()))
        }),
        Expr::Radius => {
            let mut s = 0.0;
            for (a, xa) in x.iter().enumerate() {
                let c = center.get(a).copied().unwrap_or(0.0);
                s += (xa - c) * (xa - c);
            }
            Ok(s.sqrt())
        }
        Expr::Pi => Ok(std::f64::consts::PI),
        Expr::E => Ok(std::f64::consts::E),
        Expr::Neg(a) => Ok(-eval_inner(a, x, center)?),
        Expr::Bin(op, a, b) => {
            let a = eval_inner(a, x, center)?;
            let b = eval_inner(b, x, center)?;
            match op {
                BinOp::Add => finite(a + b, "addition"),
                BinOp::Sub => finite(a - b, "subtraction"),
                BinOp::Mul => finite(a * b, "multiplication"),
                BinOp::Div => {
                    if b == 0.0 {
                        Err(Error::Eval("division by zero".into()))
                    } else {
                        finite(a / b, "division")
                    }
                }
                BinOp::Pow => {
                    if a < 0.0 && b.fract() != 0.0 {
                        return Err(Error::Eval(format!(
                            "negative base {a} with non-integer exponent {b}"
                        )));
                    }
                    let v = a.powf(b);
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::Eval(format!("{a}^{b} is not finite")))
                    }
                }
            }
        }
        Expr::Call(f, args) => {
            let a = eval_inner(&args[0], x, center)?;
            match f {
                Func::Sin => Ok(a.sin()),
                Func::Cos => Ok(a.cos()),
                Func::Exp => finite(a.exp(), "exp"),
                Func::Log => {
                    if a <= 0.0 {
                        Err(Error::Eval(format!("log of non-positive value {a}")))
                    } else {
                        Ok(a.ln())
                    }
                }
                Func::Abs => Ok(a.abs()),
                Func::Min => Ok(a.min(eval_inner(&args[1], x, center)?)),
                Func::Max => Ok(a.max(eval_inner(&args[1], x, center)?)),
            }
        }
    }
}

/// True when the expression depends on position only through `r`,
/// i.e. contains no axis variable. Used to enforce radial sources.
pub fn is_radial(e: &Expr) -> bool {
    match e {
        Expr::Var(_) => false,
        Expr::Num(_) | Expr::Radius | Expr::Pi | Expr::E => true,
        Expr::Neg(a) => is_radial(a),
        Expr::Bin(_, a, b) => is_radial(a) && is_radial(b),
        Expr::Call(_, args) => args.iter().all(is_radial),
    }
}

// Fully parenthesized, so the output reparses with identical structure.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Radius => write!(f, "r"),
            Expr::Pi => write!(f, "pi"),
            Expr::E => write!(f, "e"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    n_vars: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b' ' || b == b'\t' || b == b'\n' || b == b'\r' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Bin(BinOp::Add, Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Bin(BinOp::Sub, Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Expr::Bin(BinOp::Div, Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            // right-associative; the right side admits unary minus (2^-3)
            let exp = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() => self.number(),
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => self.name(),
            Some(b) => Err(self.err(format!("unexpected character '{}'", b as char))),
            None => Err(self.err("expected expression, found end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|b| b.is_ascii_digit()) {
                while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // not an exponent; "2e" could start "2*e" style input, reject cleanly
                self.pos = mark;
            }
        }
        let text = &self.src[start..self.pos];
        let v: f64 = text.parse().map_err(|_| Error::Parse {
            offset: start,
            msg: format!("invalid number literal '{text}'"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                offset: start,
                msg: format!("number literal '{text}' overflows f64"),
            });
        }
        self.skip_ws();
        Ok(Expr::Num(v))
    }

    fn name(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_')
        {
            self.pos += 1;
        }
        let word = &self.src[start..self.pos];
        self.skip_ws();
        match word {
            "r" => return Ok(Expr::Radius),
            "pi" => return Ok(Expr::Pi),
            "e" => return Ok(Expr::E),
            _ => {}
        }
        if let Some(digits) = word.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let k: usize = digits.parse().map_err(|_| Error::Parse {
                    offset: start,
                    msg: format!("variable index '{digits}' out of range"),
                })?;
                if k == 0 || k > self.n_vars {
                    return Err(Error::Parse {
                        offset: start,
                        msg: format!(
                            "variable {word} out of range; domain has variables x1..x{}",
                            self.n_vars
                        ),
                    });
                }
                return Ok(Expr::Var(k - 1));
            }
        }
        let func = match word {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => {
                return Err(Error::Parse {
                    offset: start,
                    msg: format!("unknown identifier '{word}'"),
                })
            }
        };
        if !self.eat(b'(') {
            return Err(self.err(format!("expected '(' after function '{word}'")));
        }
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        if !self.eat(b')') {
            return Err(self.err("expected ')' or ','"));
        }
        if args.len() != func.arity() {
            return Err(Error::Parse {
                offset: start,
                msg: format!(
                    "{word} takes {} argument(s), got {}",
                    func.arity(),
                    args.len()
                ),
            });
        }
        Ok(Expr::Call(func, args))
    }
}
