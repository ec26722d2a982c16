//! Tiny arithmetic-expression language for analytic exterior data.
//!
//! Grammar (usual precedence, `^` right-associative):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-' unary | primary
//! primary := number | ident | ident '(' expr {',' expr} ')' | '(' expr ')'
//! ```
//!
//! Variables: `x1`, `x2`, `x3` (coordinates, missing axes read 0) and `r`
//! (the Euclidean norm). Constants: `pi`, `e`. Functions: `abs`, `sqrt`,
//! `exp`, `ln`, `sin`, `cos`, `atan`, `min`, `max`, `pow`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::point::Point;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Var {
    X1,
    X2,
    X3,
    R,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    Atan,
    Min,
    Max,
    Pow,
}

impl Func {
    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max | Func::Pow => 2,
            _ => 1,
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing input at byte {} in `{src}`",
                p.pos
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, p: Point) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X1) => p.get(0),
            Expr::Var(Var::X2) => {
                if p.dim() > 1 {
                    p.get(1)
                } else {
                    0.0
                }
            }
            Expr::Var(Var::X3) => {
                if p.dim() > 2 {
                    p.get(2)
                } else {
                    0.0
                }
            }
            Expr::Var(Var::R) => p.norm(),
            Expr::Neg(e) => -e.eval(p),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(p), b.eval(p));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => libm::pow(a, b),
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(p);
                match f {
                    Func::Abs => libm::fabs(a),
                    Func::Sqrt => libm::sqrt(a),
                    Func::Exp => libm::exp(a),
                    Func::Ln => libm::log(a),
                    Func::Sin => libm::sin(a),
                    Func::Cos => libm::cos(a),
                    Func::Atan => libm::atan(a),
                    Func::Min => a.min(args[1].eval(p)),
                    Func::Max => a.max(args[1].eval(p)),
                    Func::Pow => libm::pow(a, args[1].eval(p)),
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
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
            Err(Error::Parse(format!(
                "expected `{}` at byte {}",
                c as char, self.pos
            )))
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

    // `^` binds tighter than unary minus: `-2^2` is `-(2^2)`.
    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.primary()?;
        if self.eat(b'^') {
            let exp = self.factor()?;
            Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(Error::Parse(format!(
                "expected expression at byte {}",
                self.pos
            ))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E') && self.pos > start {
                self.pos += 1;
                if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| Error::Parse(format!("bad number `{text}`")))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "x1" | "x" => return Ok(Expr::Var(Var::X1)),
            "x2" | "y" => return Ok(Expr::Var(Var::X2)),
            "x3" | "z" => return Ok(Expr::Var(Var::X3)),
            "r" => return Ok(Expr::Var(Var::R)),
            "pi" => return Ok(Expr::Num(core::f64::consts::PI)),
            "e" => return Ok(Expr::Num(core::f64::consts::E)),
            _ => {}
        }
        let func = match name {
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "atan" => Func::Atan,
            "min" => Func::Min,
            "max" => Func::Max,
            "pow" => Func::Pow,
            _ => return Err(Error::Parse(format!("unknown identifier `{name}`"))),
        };
        self.expect(b'(')?;
        let mut args = Vec::new();
        args.push(self.expr()?);
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        self.expect(b')')?;
        if args.len() != func.arity() {
            return Err(Error::Parse(format!(
                "`{name}` takes {} argument(s), got {}",
                func.arity(),
                args.len()
            )));
        }
        Ok(Expr::Call(func, args))
    }
}

/// Parsed expression together with its source text, so model strings
/// round-trip byte-exactly through files.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceExpr {
    source: String,
    ast: Expr,
}

impl SourceExpr {
    pub fn parse(source: &str) -> Result<Self> {
        let ast = Expr::parse(source)?;
        Ok(Self {
            source: String::from(source),
            ast,
        })
    }

    #[inline]
    pub fn eval(&self, p: Point) -> f64 {
        self.ast.eval(p)
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, p: Point) -> f64 {
        Expr::parse(src).unwrap().eval(p)
    }

    #[test]
    fn arithmetic_and_precedence() {
        let o = Point::d1(0.0);
        assert_eq!(ev("1+2*3", o), 7.0);
        assert_eq!(ev("(1+2)*3", o), 9.0);
        assert_eq!(ev("2^3^2", o), 512.0); // right associative
        assert_eq!(ev("-2^2", o), -4.0);
        assert_eq!(ev("6/3/2", o), 1.0);
    }

    #[test]
    fn variables_and_functions() {
        let p = Point::d2(3.0, 4.0);
        assert_eq!(ev("r", p), 5.0);
        assert_eq!(ev("x1+x2", p), 7.0);
        assert!((ev("cos(x1)", Point::d1(0.0)) - 1.0).abs() < 1e-15);
        assert!((ev("min(x1, x2)", p) - 3.0).abs() < 1e-15);
        assert!((ev("pow(r, 2)", p) - 25.0).abs() < 1e-12);
        assert!((ev("exp(ln(2.5))", p) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn missing_axes_read_zero() {
        assert_eq!(ev("x2 + x3", Point::d1(9.0)), 0.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("foo(2)").is_err());
        assert!(Expr::parse("min(1)").is_err());
        assert!(Expr::parse("1 2").is_err());
    }
}
