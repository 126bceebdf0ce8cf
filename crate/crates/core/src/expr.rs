//! Arithmetic expressions over `x` and `y` for boundary data.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr    = term (("+" | "-") term)*
//! term    = unary (("*" | "/") unary)*
//! unary   = ("+" | "-") unary | power
//! power   = primary ("^" unary)?
//! primary = number | "x" | "y" | "pi" | "e" | func "(" expr ")" | "(" expr ")"
//! func    = sin | cos | tan | exp | log | sqrt | abs
//! ```
//!
//! `^` is right associative and binds tighter than unary minus, so `-x^2` is `-(x^2)`.

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    X,
    Y,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
    text: String,
}

impl Expr {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        eval(&self.root, x, y)
    }

    pub fn eval_point(&self, p: Point) -> f64 {
        self.eval(p.x, p.y)
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

fn eval(n: &Node, x: f64, y: f64) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::X => x,
        Node::Y => y,
        Node::Neg(a) => -eval(a, x, y),
        Node::Add(a, b) => eval(a, x, y) + eval(b, x, y),
        Node::Sub(a, b) => eval(a, x, y) - eval(b, x, y),
        Node::Mul(a, b) => eval(a, x, y) * eval(b, x, y),
        Node::Div(a, b) => eval(a, x, y) / eval(b, x, y),
        Node::Pow(a, b) => eval(a, x, y).powf(eval(b, x, y)),
        Node::Call(f, a) => {
            let v = eval(a, x, y);
            match f {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Tan => v.tan(),
                Func::Exp => v.exp(),
                Func::Log => v.ln(),
                Func::Sqrt => v.sqrt(),
                Func::Abs => v.abs(),
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { offset, message: message.into() })
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == b'+' { Node::Add(lhs.into(), rhs.into()) } else { Node::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == b'*' { Node::Mul(lhs.into(), rhs.into()) } else { Node::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Node::Neg(self.unary()?.into()))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(base.into(), exp.into()));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node> {
        let start = match self.peek() {
            None => return err(self.pos, "unexpected end of input"),
            Some(_) => self.pos,
        };
        let c = self.src[start];
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if self.peek() != Some(b')') {
                return err(self.pos, "expected `)`");
            }
            self.pos += 1;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let func = match name {
                "x" => return Ok(Node::X),
                "y" => return Ok(Node::Y),
                "pi" => return Ok(Node::Num(std::f64::consts::PI)),
                "e" => return Ok(Node::Num(std::f64::consts::E)),
                "sin" => Func::Sin,
                "cos" => Func::Cos,
                "tan" => Func::Tan,
                "exp" => Func::Exp,
                "log" | "ln" => Func::Log,
                "sqrt" => Func::Sqrt,
                "abs" => Func::Abs,
                _ => return err(start, format!("unknown name `{name}`")),
            };
            if self.peek() != Some(b'(') {
                return err(self.pos, format!("expected `(` after `{name}`"));
            }
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(b')') {
                return err(self.pos, "expected `)`");
            }
            self.pos += 1;
            return Ok(Node::Call(func, arg.into()));
        }
        err(start, format!("unexpected `{}`", c as char))
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        digits(&mut self.pos);
        if self.pos < s.len() && s[self.pos] == b'.' {
            self.pos += 1;
            digits(&mut self.pos);
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < s.len() && (s[p] == b'+' || s[p] == b'-') {
                p += 1;
            }
            if p < s.len() && s[p].is_ascii_digit() {
                digits(&mut p);
                self.pos = p;
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).unwrap();
        text.parse::<f64>().map(Node::Num).or_else(|_| err(start, format!("bad number `{text}`")))
    }
}

/// Parses an expression in `x` and `y`.
pub fn parse_expression(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let root = p.expr()?;
    if let Some(c) = p.peek() {
        return err(p.pos, format!("unexpected `{}`", c as char));
    }
    Ok(Expr { root, text: text.to_string() })
}
