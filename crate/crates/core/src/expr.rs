//! Coefficient expressions: a small arithmetic grammar over four coordinates.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | coord | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus on its left (`-x^2 = -(x^2)`) and is
//! right associative. A minus sign directly in front of a numeric literal
//! that is not raised to a power is folded into the literal.

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn eval(self, x: f64) -> Result<f64> {
        let v = match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!("log of non-positive value {x}")));
                }
                x.ln()
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(Error::Domain(format!("sqrt of negative value {x}")));
                }
                x.sqrt()
            }
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
        };
        Ok(v)
    }

    fn eval_jet(self, j: &Jet2) -> Result<Jet2> {
        match self {
            Func::Sin => Ok(j.sin()),
            Func::Cos => Ok(j.cos()),
            Func::Tan => j.tan(),
            Func::Exp => Ok(j.exp()),
            Func::Log => j.ln(),
            Func::Sqrt => j.sqrt(),
            Func::Sinh => Ok(j.sinh()),
            Func::Cosh => Ok(j.cosh()),
            Func::Tanh => Ok(j.tanh()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Coordinate by index into the chart's coordinate list.
    Coord(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    /// True if no coordinate occurs in the expression.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Coord(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Plain evaluation at a point.
    pub fn eval(&self, p: &[f64; 4]) -> Result<f64> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Coord(i) => p[*i],
            Expr::Neg(a) => -a.eval(p)?,
            Expr::Call(f, a) => f.eval(a.eval(p)?)?,
            Expr::Bin(op, a, b) => {
                let x = a.eval(p)?;
                match op {
                    BinOp::Add => x + b.eval(p)?,
                    BinOp::Sub => x - b.eval(p)?,
                    BinOp::Mul => x * b.eval(p)?,
                    BinOp::Div => {
                        let y = b.eval(p)?;
                        if y == 0.0 {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        x / y
                    }
                    BinOp::Pow => {
                        let y = b.eval(p)?;
                        if let Some(n) = integer_exponent(b, y) {
                            x.powi(n as i32)
                        } else if x <= 0.0 {
                            return Err(Error::Domain(format!(
                                "non-integer power {y} of non-positive base {x}"
                            )));
                        } else {
                            x.powf(y)
                        }
                    }
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::Domain("non-finite value".into()));
        }
        Ok(v)
    }

    /// Evaluation carrying first and second derivatives in all coordinates.
    pub fn eval_jet(&self, p: &[f64; 4]) -> Result<Jet2> {
        let vars = [0, 1, 2, 3].map(|i| Jet2::variable(i, p[i]));
        self.jet(&vars)
    }

    fn jet(&self, vars: &[Jet2; 4]) -> Result<Jet2> {
        let j = match self {
            Expr::Num(v) => Jet2::constant(*v),
            Expr::Coord(i) => vars[*i],
            Expr::Neg(a) => -a.jet(vars)?,
            Expr::Call(f, a) => f.eval_jet(&a.jet(vars)?)?,
            Expr::Bin(op, a, b) => {
                let x = a.jet(vars)?;
                match op {
                    BinOp::Add => x + b.jet(vars)?,
                    BinOp::Sub => x - b.jet(vars)?,
                    BinOp::Mul => x * b.jet(vars)?,
                    BinOp::Div => x.div(&b.jet(vars)?)?,
                    BinOp::Pow => {
                        if b.is_constant() {
                            let y = b.eval(&[0.0; 4])?;
                            match integer_exponent(b, y) {
                                Some(n) => x.powi(n)?,
                                None => x.powf(y)?,
                            }
                        } else {
                            x.pow(&b.jet(vars)?)?
                        }
                    }
                }
            }
        };
        if !j.is_finite() {
            return Err(Error::Domain("non-finite derivative".into()));
        }
        Ok(j)
    }

    /// Renders with the given coordinate names, fully parenthesised so that
    /// re-parsing reproduces the same tree.
    pub fn display<'a>(&'a self, coords: &'a [String; 4]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, coords }
    }
}

fn integer_exponent(b: &Expr, value: f64) -> Option<i64> {
    if b.is_constant() && value.fract() == 0.0 && value.abs() <= 1024.0 {
        Some(value as i64)
    } else {
        None
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    coords: &'a [String; 4],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self.expr, self.coords, f)
    }
}

fn write_expr(e: &Expr, coords: &[String; 4], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => write!(f, "({v:?})"),
        Expr::Num(v) => write!(f, "{v:?}"),
        Expr::Coord(i) => write!(f, "{}", coords[*i]),
        Expr::Neg(a) => {
            write!(f, "(-(")?;
            write_expr(a, coords, f)?;
            write!(f, "))")
        }
        Expr::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(a, coords, f)?;
            write!(f, ")")
        }
        Expr::Bin(op, a, b) => {
            write!(f, "(")?;
            write_expr(a, coords, f)?;
            write!(f, "{}", op.symbol())?;
            write_expr(b, coords, f)?;
            write!(f, ")")
        }
    }
}

/// Where an expression-level error happened, relative to the expression text.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprError {
    Syntax { offset: usize, message: String },
    UnknownFunction(String),
    UnknownIdentifier(String),
}

impl ExprError {
    /// Attach document position: `column` is the 1-based column of the first
    /// character of the expression text.
    pub fn located(self, line: usize, column: usize) -> Error {
        match self {
            ExprError::Syntax { offset, message } => Error::Syntax {
                line,
                column: column + offset,
                message,
            },
            ExprError::UnknownFunction(name) => Error::UnknownFunction { line, name },
            ExprError::UnknownIdentifier(name) => Error::UnknownIdentifier { line, name },
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
    End,
}

struct Lexer<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().collect(),
            pos: 0,
            src,
        }
    }

    fn tokens(mut self) -> std::result::Result<Vec<(usize, Tok)>, ExprError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
                self.pos += 1;
            }
            let Some(&(start, c)) = self.chars.get(self.pos) else {
                out.push((self.src.chars().count(), Tok::End));
                return Ok(out);
            };
            let col = self.pos;
            if c.is_ascii_digit() || c == '.' {
                let mut end = self.pos;
                while end < self.chars.len()
                    && (self.chars[end].1.is_ascii_digit() || self.chars[end].1 == '.')
                {
                    end += 1;
                }
                // exponent part: e / E followed by optional sign and digits
                if end < self.chars.len() && matches!(self.chars[end].1, 'e' | 'E') {
                    let mut k = end + 1;
                    if k < self.chars.len() && matches!(self.chars[k].1, '+' | '-') {
                        k += 1;
                    }
                    if k < self.chars.len() && self.chars[k].1.is_ascii_digit() {
                        while k < self.chars.len() && self.chars[k].1.is_ascii_digit() {
                            k += 1;
                        }
                        end = k;
                    }
                }
                let byte_end = self.chars.get(end).map_or(self.src.len(), |c| c.0);
                let text = &self.src[start..byte_end];
                let v: f64 = text.parse().map_err(|_| ExprError::Syntax {
                    offset: col,
                    message: format!("malformed number `{text}`"),
                })?;
                out.push((col, Tok::Num(v)));
                self.pos = end;
            } else if c.is_alphabetic() || c == '_' {
                let mut end = self.pos;
                while end < self.chars.len()
                    && (self.chars[end].1.is_alphanumeric() || self.chars[end].1 == '_')
                {
                    end += 1;
                }
                let byte_end = self.chars.get(end).map_or(self.src.len(), |c| c.0);
                out.push((col, Tok::Ident(self.src[start..byte_end].to_string())));
                self.pos = end;
            } else {
                let tok = match c {
                    '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => {
                        return Err(ExprError::Syntax {
                            offset: col,
                            message: format!("unexpected character `{c}`"),
                        })
                    }
                };
                out.push((col, tok));
                self.pos += 1;
            }
        }
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    coords: &'a [String; 4],
}

type PResult<T> = std::result::Result<T, ExprError>;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ExprError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            if let Tok::Num(v) = *self.peek() {
                let next_is_pow = matches!(self.toks.get(self.pos + 1), Some((_, Tok::Op('^'))));
                if !next_is_pow {
                    self.bump();
                    return Ok(Expr::Num(-v));
                }
            }
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.error("expected `)`");
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let Some(func) = Func::from_name(&name) else {
                        return Err(ExprError::UnknownFunction(name));
                    };
                    self.bump();
                    let arg = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return self.error("expected `)` after function argument");
                    }
                    self.bump();
                    Ok(Expr::call(func, arg))
                } else if let Some(i) = self.coords.iter().position(|c| *c == name) {
                    Ok(Expr::Coord(i))
                } else if name == "pi" {
                    Ok(Expr::Num(std::f64::consts::PI))
                } else {
                    Err(ExprError::UnknownIdentifier(name))
                }
            }
            Tok::End => {
                self.pos = self.toks.len() - 1;
                self.error("unexpected end of expression")
            }
            other => {
                if self.pos > 0 {
                    self.pos -= 1;
                }
                self.error(format!("unexpected token {other:?}"))
            }
        }
    }
}

/// Parses one expression over the given coordinate names.
pub fn parse_expr(text: &str, coords: &[String; 4]) -> std::result::Result<Expr, ExprError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        coords,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error("trailing input");
    }
    Ok(e)
}
