//! Rational expressions over `x1..xn` and `u`.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := atom ("^" integer)?
//! atom   := number | "x"integer | "u" | "(" expr ")" | "-" atom
//!         | "pwl" "(" expr (";" number "," number)+ ")"
//! ```
//!
//! Unary minus binds to the atom, so `-x1^2` is `(-x1)^2`. Write `-(x1^2)`
//! for the other reading. `pwl(e; a0,b0; a1,b1; ...)` is the polyline through
//! the listed vertices (strictly increasing abscissae), held constant outside
//! its first and last vertex.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use crate::math::powi;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Zero-based state index (`x1` is `State(0)`).
    State(usize),
    Input,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Pwl(Box<Expr>, Vec<(f64, f64)>),
}

/// Variable with respect to which [`Expr::eval_dual`] differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    State(usize),
    Input,
}

impl Expr {
    pub fn parse(text: &str, dim: usize) -> Result<Expr> {
        Self::parse_at(text, dim, 1, 0)
    }

    /// Parses `text`, reporting positions relative to `line` and a column
    /// offset (the expression's start within its line).
    pub(crate) fn parse_at(text: &str, dim: usize, line: usize, col_offset: usize) -> Result<Expr> {
        let mut p = Parser { src: text.as_bytes(), pos: 0, dim, line, col_offset };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Highest state index referenced plus one (0 if none).
    pub fn state_arity(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Input => 0,
            Expr::State(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Pwl(a, _) => a.state_arity(),
            Expr::Bin(_, a, b) => a.state_arity().max(b.state_arity()),
        }
    }

    pub fn eval(&self, state: &[f64], input: f64) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::State(i) => *state.get(*i).ok_or(Error::DimensionMismatch { expected: i + 1, found: state.len() })?,
            Expr::Input => input,
            Expr::Neg(a) => -a.eval(state, input)?,
            Expr::Bin(op, a, b) => {
                let x = a.eval(state, input)?;
                let y = b.eval(state, input)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(Error::DivisionByZero { expr: self.to_string() });
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(a, n) => powi(a.eval(state, input)?, *n as i32),
            Expr::Pwl(a, verts) => pwl_eval(verts, a.eval(state, input)?).0,
        })
    }

    /// Value and derivative with respect to `var` (forward mode).
    pub fn eval_dual(&self, state: &[f64], input: f64, var: Var) -> Result<(f64, f64)> {
        Ok(match self {
            Expr::Num(v) => (*v, 0.0),
            Expr::State(i) => {
                let v = *state.get(*i).ok_or(Error::DimensionMismatch { expected: i + 1, found: state.len() })?;
                (v, if var == Var::State(*i) { 1.0 } else { 0.0 })
            }
            Expr::Input => (input, if var == Var::Input { 1.0 } else { 0.0 }),
            Expr::Neg(a) => {
                let (v, d) = a.eval_dual(state, input, var)?;
                (-v, -d)
            }
            Expr::Bin(op, a, b) => {
                let (x, dx) = a.eval_dual(state, input, var)?;
                let (y, dy) = b.eval_dual(state, input, var)?;
                match op {
                    BinOp::Add => (x + y, dx + dy),
                    BinOp::Sub => (x - y, dx - dy),
                    BinOp::Mul => (x * y, dx * y + x * dy),
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(Error::DivisionByZero { expr: self.to_string() });
                        }
                        (x / y, (dx * y - x * dy) / (y * y))
                    }
                }
            }
            Expr::Pow(a, n) => {
                let (v, d) = a.eval_dual(state, input, var)?;
                match *n {
                    0 => (1.0, 0.0),
                    n => (powi(v, n as i32), n as f64 * powi(v, n as i32 - 1) * d),
                }
            }
            Expr::Pwl(a, verts) => {
                let (v, d) = a.eval_dual(state, input, var)?;
                let (y, slope) = pwl_eval(verts, v);
                (y, slope * d)
            }
        })
    }
}

/// Polyline value and slope at `x`, constant outside the vertex range.
fn pwl_eval(verts: &[(f64, f64)], x: f64) -> (f64, f64) {
    let (first, last) = (verts[0], verts[verts.len() - 1]);
    if x <= first.0 {
        return (first.1, 0.0);
    }
    if x >= last.0 {
        return (last.1, 0.0);
    }
    let k = verts.partition_point(|v| v.0 <= x).clamp(1, verts.len() - 1);
    let (a, b) = (verts[k - 1], verts[k]);
    let slope = (b.1 - a.1) / (b.0 - a.0);
    (a.1 + slope * (x - a.0), slope)
}

fn write_num(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
        write!(f, "(-{:?})", -v)
    } else {
        write!(f, "{v:?}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write_num(f, *v),
            Expr::State(i) => write!(f, "x{}", i + 1),
            Expr::Input => f.write_str("u"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Pow(a, n) => write!(f, "({a})^{n}"),
            Expr::Pwl(a, verts) => {
                write!(f, "pwl({a}")?;
                for (x, y) in verts {
                    write!(f, "; {x:?},{y:?}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
    line: usize,
    col_offset: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { line: self.line, column: self.col_offset + self.pos + 1, message: msg.to_owned() }
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            let digits = self.take_while(|c| c.is_ascii_digit());
            if digits.is_empty() {
                self.pos = start;
                return Err(self.err("expected a nonnegative integer exponent"));
            }
            let n: u32 = digits.parse().map_err(|_| self.err("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && pred(self.src[self.pos]) {
            self.pos += 1;
        }
        core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        self.take_while(|c| c.is_ascii_digit() || c == b'.');
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if self.take_while(|c| c.is_ascii_digit()).is_empty() {
                self.pos = save;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse::<f64>().map_err(|_| {
            self.pos = start;
            self.err("malformed number")
        })
    }

    fn signed_number(&mut self) -> Result<f64> {
        if self.eat(b'-') {
            Ok(-self.number()?)
        } else {
            self.number()
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.err("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
                    return Ok(Expr::Num(-self.number()?));
                }
                Ok(Expr::Neg(Box::new(self.atom()?)))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Num(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let ident = self.take_while(|c| c.is_ascii_alphanumeric() || c == b'_').to_string();
                match ident.as_str() {
                    "u" => Ok(Expr::Input),
                    "pwl" => self.pwl(),
                    s if s.starts_with('x') && s.len() > 1 && s[1..].bytes().all(|b| b.is_ascii_digit()) => {
                        let idx: usize = s[1..].parse().unwrap_or(0);
                        if idx == 0 || idx > self.dim {
                            return Err(Error::UnknownVariable { name: ident, dim: self.dim });
                        }
                        Ok(Expr::State(idx - 1))
                    }
                    _ => {
                        self.pos = start;
                        Err(Error::UnknownVariable { name: ident, dim: self.dim })
                    }
                }
            }
            Some(c) => Err(self.err(&format!("unexpected character `{}`", c as char))),
        }
    }

    fn pwl(&mut self) -> Result<Expr> {
        self.expect(b'(')?;
        let arg = self.expr()?;
        let mut verts = Vec::new();
        while self.eat(b';') {
            let x = self.signed_number()?;
            self.expect(b',')?;
            let y = self.signed_number()?;
            if let Some(&(px, _)) = verts.last() {
                if x <= px {
                    return Err(self.err("pwl abscissae must be strictly increasing"));
                }
            }
            verts.push((x, y));
        }
        self.expect(b')')?;
        if verts.len() < 2 {
            return Err(self.err("pwl needs at least two vertices"));
        }
        Ok(Expr::Pwl(Box::new(arg), verts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: &str = "x1*(2*x1^2 - 9*x1 + 12)";

    #[test]
    fn cubic_values() {
        let p = Expr::parse(P, 1).unwrap();
        assert_eq!(p.eval(&[1.0], 0.0).unwrap(), 5.0);
        assert_eq!(p.eval(&[2.0], 0.0).unwrap(), 4.0);
        let h = Expr::parse("1/(1+x1^2)", 1).unwrap();
        assert_eq!(h.eval(&[0.0], 0.0).unwrap(), 1.0);
    }

    #[test]
    fn derivative_matches_hand_computation() {
        // P'(z) = 6z^2 - 18z + 12
        let p = Expr::parse(P, 1).unwrap();
        for z in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let (_, d) = p.eval_dual(&[z], 0.0, Var::State(0)).unwrap();
            assert_eq!(d, 6.0 * z * z - 18.0 * z + 12.0);
        }
        let e = Expr::parse("x1/(1+u^2)", 1).unwrap();
        let (_, du) = e.eval_dual(&[2.0], 1.0, Var::Input).unwrap();
        assert_eq!(du, -1.0);
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = Expr::parse("2 + 3*4 - 8/2", 0).unwrap();
        assert_eq!(e.eval(&[], 0.0).unwrap(), 10.0);
        let e = Expr::parse("-x1^2", 1).unwrap();
        assert_eq!(e.eval(&[3.0], 0.0).unwrap(), 9.0);
        let e = Expr::parse("-(x1^2)", 1).unwrap();
        assert_eq!(e.eval(&[3.0], 0.0).unwrap(), -9.0);
        let e = Expr::parse("1.5e1 - -u", 0).unwrap();
        assert_eq!(e.eval(&[], 2.0).unwrap(), 17.0);
    }

    #[test]
    fn pwl_is_polyline_with_constant_extension() {
        let e = Expr::parse("pwl(u; 0,5; 0.5,4.5; 2.5,4.5; 3.5,3)", 0).unwrap();
        assert_eq!(e.eval(&[], 0.25).unwrap(), 4.75);
        assert_eq!(e.eval(&[], 1.0).unwrap(), 4.5);
        assert_eq!(e.eval(&[], 3.0).unwrap(), 3.75);
        assert_eq!(e.eval(&[], 9.0).unwrap(), 3.0);
        assert_eq!(e.eval(&[], -1.0).unwrap(), 5.0);
        let (_, d) = e.eval_dual(&[], 3.0, Var::Input).unwrap();
        assert_eq!(d, -1.5);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            Expr::parse("x3 + 1", 2),
            Err(Error::UnknownVariable { ref name, dim: 2 }) if name == "x3"
        ));
        assert!(matches!(Expr::parse("x1 +", 1), Err(Error::Syntax { column: 5, .. })));
        assert!(matches!(Expr::parse("(x1", 1), Err(Error::Syntax { .. })));
        assert!(matches!(Expr::parse("x1^-2", 1), Err(Error::Syntax { .. })));
        assert!(matches!(Expr::parse("pwl(u; 1,0; 0,1)", 0), Err(Error::Syntax { .. })));
        let e = Expr::parse("1/(x1-1)", 1).unwrap();
        match e.eval(&[1.0], 0.0) {
            Err(Error::DivisionByZero { expr }) => assert_eq!(expr, "(1.0 / (x1 - 1.0))"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "-(x1*(2*x1^2 - 9*x1 + 12)) + u",
            "-x1 + 5 + 1/(1+u^2)",
            "-x1 + pwl(u; 0,5; 0.5,4.5; 2.5,4.5; 3.5,-3)",
            "-(-2.5) * -x2 / 1e-3",
        ] {
            let e = Expr::parse(src, 2).unwrap();
            let back = Expr::parse(&e.to_string(), 2).unwrap();
            assert_eq!(e, back, "{src}");
        }
    }
}
