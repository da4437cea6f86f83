use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

use super::{Jet, Scalar, Var};

/// A one-variable smooth function built from a small set of primitives.
///
/// Used for the arbitrary functions f, g, τ, φ, ψ, χ, Φ that the symmetry
/// algebras and conservation laws carry.
#[derive(Clone, Debug, PartialEq)]
pub enum SmoothFn {
    Const(f64),
    Id,
    Add(Arc<SmoothFn>, Arc<SmoothFn>),
    Sub(Arc<SmoothFn>, Arc<SmoothFn>),
    Mul(Arc<SmoothFn>, Arc<SmoothFn>),
    Div(Arc<SmoothFn>, Arc<SmoothFn>),
    Powi(Arc<SmoothFn>, i32),
    Sin(Arc<SmoothFn>),
    Cos(Arc<SmoothFn>),
    Exp(Arc<SmoothFn>),
    Ln(Arc<SmoothFn>),
}

impl SmoothFn {
    pub fn constant(c: f64) -> Self {
        SmoothFn::Const(c)
    }

    pub fn id() -> Self {
        SmoothFn::Id
    }

    pub fn powi(self, n: i32) -> Self {
        SmoothFn::Powi(Arc::new(self), n)
    }

    pub fn sin(self) -> Self {
        SmoothFn::Sin(Arc::new(self))
    }

    pub fn cos(self) -> Self {
        SmoothFn::Cos(Arc::new(self))
    }

    pub fn exp(self) -> Self {
        SmoothFn::Exp(Arc::new(self))
    }

    pub fn ln(self) -> Self {
        SmoothFn::Ln(Arc::new(self))
    }

    /// Applies the function to a jet argument.
    pub fn eval_jet<S: Scalar>(&self, arg: &Jet<S>) -> Result<Jet<S>> {
        Ok(match self {
            SmoothFn::Const(c) => Jet::constant(S::from_f64(*c), arg.point(), arg.order()),
            SmoothFn::Id => arg.clone(),
            SmoothFn::Add(a, b) => &a.eval_jet(arg)? + &b.eval_jet(arg)?,
            SmoothFn::Sub(a, b) => &a.eval_jet(arg)? - &b.eval_jet(arg)?,
            SmoothFn::Mul(a, b) => &a.eval_jet(arg)? * &b.eval_jet(arg)?,
            SmoothFn::Div(a, b) => a.eval_jet(arg)?.try_div(&b.eval_jet(arg)?)?,
            SmoothFn::Powi(a, n) => a.eval_jet(arg)?.powi(*n)?,
            SmoothFn::Sin(a) => a.eval_jet(arg)?.sin(),
            SmoothFn::Cos(a) => a.eval_jet(arg)?.cos(),
            SmoothFn::Exp(a) => a.eval_jet(arg)?.exp(),
            SmoothFn::Ln(a) => a.eval_jet(arg)?.ln()?,
        })
    }

    /// Values f(s), f′(s), …, f⁽ⁿ⁾(s).
    pub fn derivatives<S: Scalar>(&self, s: S, n: usize) -> Result<Vec<S>> {
        let seed = Jet::variable(s, Var::T, [0.0; 3], n);
        if seed.order() < n {
            return Err(Error::OrderExceeded {
                needed: n,
                available: seed.order(),
            });
        }
        let j = self.eval_jet(&seed)?;
        Ok((0..=n)
            .map(|k| j.get(super::MultiIndex::new(k as u8, 0, 0)))
            .collect())
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        Ok(self.derivatives(s, 0)?[0])
    }

    /// Parses the prefix notation used for expressions, with `s` (or `t`)
    /// as the variable, e.g. `(+ 1 (^ s 2))`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Reader::new(src);
        let f = p.item()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(f)
    }
}

impl fmt::Display for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothFn::Const(c) => write!(f, "{c:?}"),
            SmoothFn::Id => write!(f, "s"),
            SmoothFn::Add(a, b) => write!(f, "(+ {a} {b})"),
            SmoothFn::Sub(a, b) => write!(f, "(- {a} {b})"),
            SmoothFn::Mul(a, b) => write!(f, "(* {a} {b})"),
            SmoothFn::Div(a, b) => write!(f, "(/ {a} {b})"),
            SmoothFn::Powi(a, n) => write!(f, "(^ {a} {n})"),
            SmoothFn::Sin(a) => write!(f, "(sin {a})"),
            SmoothFn::Cos(a) => write!(f, "(cos {a})"),
            SmoothFn::Exp(a) => write!(f, "(exp {a})"),
            SmoothFn::Ln(a) => write!(f, "(ln {a})"),
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Reader { src, pos: 0 }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
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

    fn token(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let end = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        if end == 0 {
            return Err(self.err("expected token"));
        }
        self.pos += end;
        Ok(&rest[..end])
    }

    fn item(&mut self) -> Result<SmoothFn> {
        self.skip_ws();
        if self.src[self.pos..].starts_with('(') {
            self.pos += 1;
            let head = self.token()?;
            let mut args = Vec::new();
            let mut int_arg = None;
            loop {
                self.skip_ws();
                if self.src[self.pos..].starts_with(')') {
                    self.pos += 1;
                    break;
                }
                if self.pos >= self.src.len() {
                    return Err(self.err("unclosed parenthesis"));
                }
                if head == "^" && args.len() == 1 {
                    let tok = self.token()?;
                    int_arg = Some(tok.parse::<i32>().map_err(|_| self.err("integer exponent expected"))?);
                } else {
                    args.push(self.item()?);
                }
            }
            let fold = |args: Vec<SmoothFn>, f: fn(SmoothFn, SmoothFn) -> SmoothFn| {
                let mut it = args.into_iter();
                let first = it.next();
                first.map(|a| it.fold(a, f))
            };
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(self.err(&format!("`{head}` takes {n} argument(s)")))
                }
            };
            let out = match head {
                "+" => fold(args, |a, b| a + b),
                "*" => fold(args, |a, b| a * b),
                "-" if args.len() == 1 => Some(-args.into_iter().next().unwrap()),
                "-" => fold(args, |a, b| a - b),
                "/" => {
                    arity(2)?;
                    fold(args, |a, b| a / b)
                }
                "^" => {
                    arity(1)?;
                    let n = int_arg.ok_or_else(|| self.err("missing exponent"))?;
                    Some(args.into_iter().next().unwrap().powi(n))
                }
                "sin" | "cos" | "exp" | "ln" => {
                    arity(1)?;
                    let a = args.into_iter().next().unwrap();
                    Some(match head {
                        "sin" => a.sin(),
                        "cos" => a.cos(),
                        "exp" => a.exp(),
                        _ => a.ln(),
                    })
                }
                _ => return Err(self.err(&format!("unknown operator `{head}`"))),
            };
            out.ok_or_else(|| self.err("empty operand list"))
        } else {
            let tok = self.token()?;
            match tok {
                "s" | "t" => Ok(SmoothFn::Id),
                _ => tok
                    .parse::<f64>()
                    .map(SmoothFn::Const)
                    .map_err(|_| self.err(&format!("bad atom `{tok}`"))),
            }
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $var:ident) => {
        impl $tr for SmoothFn {
            type Output = SmoothFn;
            fn $m(self, o: SmoothFn) -> SmoothFn {
                SmoothFn::$var(Arc::new(self), Arc::new(o))
            }
        }
        impl $tr<f64> for SmoothFn {
            type Output = SmoothFn;
            fn $m(self, o: f64) -> SmoothFn {
                SmoothFn::$var(Arc::new(self), Arc::new(SmoothFn::Const(o)))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl Neg for SmoothFn {
    type Output = SmoothFn;
    fn neg(self) -> SmoothFn {
        SmoothFn::Const(-1.0) * self
    }
}
