//! Prefix-notation text form. See `docs/expr-format.md`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::{MultiIndex, Var};

use super::{ElemFn, Expr, Node};

fn field_atom(field: u8, index: MultiIndex) -> String {
    let base = if field == 0 { "H".to_string() } else { format!("u{field}") };
    if index.degree() == 0 {
        base
    } else {
        format!("{base}_{}", index.letters())
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, z: Complex64) -> fmt::Result {
    if z.im == 0.0 {
        write!(f, "{:?}", z.re)
    } else {
        write!(f, "(complex {:?} {:?})", z.re, z.im)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Coord(v) => write!(f, "{}", v.name()),
            Node::Field { field, index } => write!(f, "{}", field_atom(*field, *index)),
            Node::Const(z) => write_const(f, *z),
            Node::Slot { name, deriv, arg } => write!(f, "(slot {name} {deriv} {arg})"),
            Node::Sum(v) | Node::Product(v) => {
                let op = if matches!(self.node(), Node::Sum(_)) { "+" } else { "*" };
                write!(f, "({op}")?;
                for e in v {
                    write!(f, " {e}")?;
                }
                write!(f, ")")
            }
            Node::Quotient(a, b) => write!(f, "(/ {a} {b})"),
            Node::Power(a, n) => write!(f, "(^ {a} {n})"),
            Node::Elem(g, a) => write!(f, "({} {a})", g.name()),
        }
    }
}

impl Expr {
    pub fn to_prefix(&self) -> String {
        self.to_string()
    }

    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { src, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn token(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let end = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        if end == 0 {
            return Err(self.err("expected a token"));
        }
        self.pos += end;
        Ok(&rest[..end])
    }

    fn number(&mut self) -> Result<f64> {
        let tok = self.token()?;
        tok.parse::<f64>()
            .map_err(|_| self.err(&format!("expected a number, found `{tok}`")))
    }

    fn close(&mut self) -> Result<()> {
        if self.peek() == Some(')') {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err("expected `)`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let head = self.token()?;
                let e = match head {
                    "+" | "*" | "-" => {
                        let mut args = Vec::new();
                        while self.peek() != Some(')') {
                            if self.peek().is_none() {
                                return Err(self.err("unclosed `(`"));
                            }
                            args.push(self.expr()?);
                        }
                        if args.is_empty() {
                            return Err(self.err("empty operand list"));
                        }
                        match head {
                            "+" => Expr::sum(args),
                            "*" => Expr::product(args),
                            _ if args.len() == 1 => -args.pop().unwrap(),
                            _ => {
                                let first = args.remove(0);
                                Expr::sum(std::iter::once(first).chain(args.into_iter().map(|a| -a)))
                            }
                        }
                    }
                    "/" => {
                        let a = self.expr()?;
                        let b = self.expr()?;
                        Expr::quotient(a, b)
                    }
                    "^" => {
                        let a = self.expr()?;
                        let tok = self.token()?;
                        let n = tok
                            .parse::<i32>()
                            .map_err(|_| self.err("integer exponent expected"))?;
                        a.powi(n)
                    }
                    "complex" => {
                        let re = self.number()?;
                        let im = self.number()?;
                        Expr::complex(Complex64::new(re, im))
                    }
                    "slot" => {
                        let name = self.token()?;
                        let d = self
                            .token()?
                            .parse::<u8>()
                            .map_err(|_| self.err("slot derivative order expected"))?;
                        let arg = self.expr()?;
                        Expr::slot_d(name, d, arg)
                    }
                    "sin" | "cos" | "exp" | "ln" | "sqrt" => {
                        let f = match head {
                            "sin" => ElemFn::Sin,
                            "cos" => ElemFn::Cos,
                            "exp" => ElemFn::Exp,
                            "ln" => ElemFn::Ln,
                            _ => ElemFn::Sqrt,
                        };
                        Expr::elem(f, self.expr()?)
                    }
                    _ => return Err(self.err(&format!("unknown operator `{head}`"))),
                };
                self.close()?;
                Ok(e)
            }
            Some(')') => Err(self.err("unexpected `)`")),
            Some(_) => {
                let start = self.pos;
                let tok = self.token()?;
                atom(tok).ok_or(Error::Parse {
                    pos: start,
                    msg: format!("unknown atom `{tok}`"),
                })
            }
        }
    }
}

fn atom(tok: &str) -> Option<Expr> {
    match tok {
        "t" => return Some(Expr::t()),
        "x" => return Some(Expr::x()),
        "y" => return Some(Expr::y()),
        _ => {}
    }
    if let Ok(v) = tok.parse::<f64>() {
        return Some(Expr::c(v));
    }
    let (base, letters) = match tok.split_once('_') {
        Some((b, l)) => (b, l),
        None => (tok, ""),
    };
    let field = if base == "H" {
        0
    } else {
        base.strip_prefix('u')?.parse::<u8>().ok()?
    };
    if tok.contains('_') && letters.is_empty() {
        return None;
    }
    let mut idx = MultiIndex::ZERO;
    for c in letters.chars() {
        let v = match c {
            't' => Var::T,
            'x' => Var::X,
            'y' => Var::Y,
            _ => return None,
        };
        idx = idx.bump(v);
    }
    Some(Expr::field(field, idx))
}
