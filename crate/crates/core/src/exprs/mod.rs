//! Differential-polynomial expression IR.
//!
//! Expressions live over the coordinates (t, x, y), jet coordinates of one
//! or more unknown fields, and named one-variable function slots. Identities
//! are established by evaluating on jets; the only simplification performed
//! is constant folding and flattening of sums and products.

mod derive;
mod eval;
mod text;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::jet::{MultiIndex, SmoothFn, Var};

pub use eval::EvalContext;

/// Named smooth functions referenced by `Slot` nodes.
pub type Slots = BTreeMap<String, SmoothFn>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElemFn {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl ElemFn {
    pub fn name(self) -> &'static str {
        match self {
            ElemFn::Sin => "sin",
            ElemFn::Cos => "cos",
            ElemFn::Exp => "exp",
            ElemFn::Ln => "ln",
            ElemFn::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, PartialEq)]
pub enum Node {
    Coord(Var),
    /// Derivative `index` of unknown field number `field` (0 is H).
    Field { field: u8, index: MultiIndex },
    Const(Complex64),
    /// `name⁽ᵈᵉʳⁱᵛ⁾(arg)`.
    Slot { name: Arc<str>, deriv: u8, arg: Expr },
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Expr, Expr),
    Power(Expr, i32),
    Elem(ElemFn, Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    fn wrap(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn coord(v: Var) -> Expr {
        Expr::wrap(Node::Coord(v))
    }

    pub fn t() -> Expr {
        Expr::coord(Var::T)
    }

    pub fn x() -> Expr {
        Expr::coord(Var::X)
    }

    pub fn y() -> Expr {
        Expr::coord(Var::Y)
    }

    pub fn field(field: u8, index: MultiIndex) -> Expr {
        Expr::wrap(Node::Field { field, index })
    }

    /// H_{t^i x^j y^k}.
    pub fn h(i: u8, j: u8, k: u8) -> Expr {
        Expr::field(0, MultiIndex::new(i, j, k))
    }

    pub fn c(v: f64) -> Expr {
        Expr::complex(Complex64::new(v, 0.0))
    }

    pub fn complex(z: Complex64) -> Expr {
        Expr::wrap(Node::Const(z))
    }

    pub fn i() -> Expr {
        Expr::complex(Complex64::new(0.0, 1.0))
    }

    pub fn zero() -> Expr {
        Expr::c(0.0)
    }

    pub fn one() -> Expr {
        Expr::c(1.0)
    }

    pub fn slot(name: &str, arg: Expr) -> Expr {
        Expr::slot_d(name, 0, arg)
    }

    pub fn slot_d(name: &str, deriv: u8, arg: Expr) -> Expr {
        Expr::wrap(Node::Slot {
            name: Arc::from(name),
            deriv,
            arg,
        })
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self.node() {
            Node::Const(z) => Some(*z),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(Complex64::new(0.0, 0.0))
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(Complex64::new(1.0, 0.0))
    }

    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut flat = Vec::new();
        let mut acc = Complex64::new(0.0, 0.0);
        for t in terms {
            match t.node() {
                Node::Const(z) => acc += z,
                Node::Sum(inner) => {
                    for u in inner {
                        match u.node() {
                            Node::Const(z) => acc += z,
                            _ => flat.push(u.clone()),
                        }
                    }
                }
                _ => flat.push(t),
            }
        }
        if acc != Complex64::new(0.0, 0.0) {
            flat.push(Expr::complex(acc));
        }
        match flat.len() {
            0 => Expr::zero(),
            1 => flat.pop().unwrap(),
            _ => Expr::wrap(Node::Sum(flat)),
        }
    }

    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut flat = Vec::new();
        let mut acc = Complex64::new(1.0, 0.0);
        for f in factors {
            match f.node() {
                Node::Const(z) => acc *= z,
                Node::Product(inner) => {
                    for u in inner {
                        match u.node() {
                            Node::Const(z) => acc *= z,
                            _ => flat.push(u.clone()),
                        }
                    }
                }
                _ => flat.push(f),
            }
        }
        if acc == Complex64::new(0.0, 0.0) {
            return Expr::zero();
        }
        if acc != Complex64::new(1.0, 0.0) {
            flat.insert(0, Expr::complex(acc));
        }
        match flat.len() {
            0 => Expr::complex(acc),
            1 => flat.pop().unwrap(),
            _ => Expr::wrap(Node::Product(flat)),
        }
    }

    pub fn quotient(a: Expr, b: Expr) -> Expr {
        if b.is_one() || a.is_zero() {
            return a;
        }
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != Complex64::new(0.0, 0.0) => Expr::complex(x / y),
            (_, Some(y)) if y != Complex64::new(0.0, 0.0) => {
                Expr::product([Expr::complex(Complex64::new(1.0, 0.0) / y), a])
            }
            _ => Expr::wrap(Node::Quotient(a, b)),
        }
    }

    pub fn powi(&self, n: i32) -> Expr {
        match n {
            0 => Expr::one(),
            1 => self.clone(),
            _ => match self.as_const() {
                Some(z) if n > 0 || z != Complex64::new(0.0, 0.0) => Expr::complex(z.powi(n)),
                _ => Expr::wrap(Node::Power(self.clone(), n)),
            },
        }
    }

    pub fn elem(f: ElemFn, a: Expr) -> Expr {
        if let Some(z) = a.as_const() {
            let real = z.im == 0.0;
            let folded = match f {
                ElemFn::Sin if real => Some(Complex64::new(z.re.sin(), 0.0)),
                ElemFn::Cos if real => Some(Complex64::new(z.re.cos(), 0.0)),
                ElemFn::Exp if real => Some(Complex64::new(z.re.exp(), 0.0)),
                ElemFn::Ln if real && z.re > 0.0 => Some(Complex64::new(z.re.ln(), 0.0)),
                ElemFn::Sqrt if real && z.re > 0.0 => Some(Complex64::new(z.re.sqrt(), 0.0)),
                _ => None,
            };
            if let Some(c) = folded {
                return Expr::complex(c);
            }
        }
        Expr::wrap(Node::Elem(f, a))
    }

    pub fn sin(&self) -> Expr {
        Expr::elem(ElemFn::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::elem(ElemFn::Cos, self.clone())
    }

    pub fn exp(&self) -> Expr {
        Expr::elem(ElemFn::Exp, self.clone())
    }

    pub fn ln(&self) -> Expr {
        Expr::elem(ElemFn::Ln, self.clone())
    }

    pub fn sqrt(&self) -> Expr {
        Expr::elem(ElemFn::Sqrt, self.clone())
    }

    /// Real power a^p written as exp(p·ln a).
    pub fn powf(&self, p: f64) -> Expr {
        if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
            return self.powi(p as i32);
        }
        (Expr::c(p) * self.ln()).exp()
    }

    /// Largest total derivative order of any field occurring in the tree.
    pub fn max_field_order(&self) -> usize {
        let mut m = 0;
        self.visit(&mut |n| {
            if let Node::Field { index, .. } = n {
                m = m.max(index.degree());
            }
        });
        m
    }

    pub fn fields(&self) -> BTreeSet<(u8, MultiIndex)> {
        let mut s = BTreeSet::new();
        self.visit(&mut |n| {
            if let Node::Field { field, index } = n {
                s.insert((*field, *index));
            }
        });
        s
    }

    pub fn slot_names(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.visit(&mut |n| {
            if let Node::Slot { name, .. } = n {
                s.insert(name.to_string());
            }
        });
        s
    }

    pub fn max_slot_deriv(&self) -> usize {
        let mut m = 0;
        self.visit(&mut |n| {
            if let Node::Slot { deriv, .. } = n {
                m = m.max(*deriv as usize);
            }
        });
        m
    }

    fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Coord(_) | Node::Field { .. } | Node::Const(_) => vec![],
            Node::Slot { arg, .. } => vec![arg],
            Node::Sum(v) | Node::Product(v) => v.iter().collect(),
            Node::Quotient(a, b) => vec![a, b],
            Node::Power(a, _) | Node::Elem(_, a) => vec![a],
        }
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Node)) {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.key()) {
                continue;
            }
            f(e.node());
            stack.extend(e.children());
        }
    }

    /// Rebuilds the tree, replacing every node for which `f` returns an
    /// expression. Replacements are not descended into.
    pub fn substitute(&self, f: &dyn Fn(&Node) -> Option<Expr>) -> Expr {
        let mut memo = HashMap::new();
        self.subst_rec(f, &mut memo)
    }

    fn subst_rec(&self, f: &dyn Fn(&Node) -> Option<Expr>, memo: &mut HashMap<usize, Expr>) -> Expr {
        if let Some(e) = memo.get(&self.key()) {
            return e.clone();
        }
        let out = if let Some(r) = f(self.node()) {
            r
        } else {
            match self.node() {
                Node::Coord(_) | Node::Field { .. } | Node::Const(_) => self.clone(),
                Node::Slot { name, deriv, arg } => Expr::wrap(Node::Slot {
                    name: name.clone(),
                    deriv: *deriv,
                    arg: arg.subst_rec(f, memo),
                }),
                Node::Sum(v) => Expr::sum(v.iter().map(|e| e.subst_rec(f, memo)).collect::<Vec<_>>()),
                Node::Product(v) => Expr::product(v.iter().map(|e| e.subst_rec(f, memo)).collect::<Vec<_>>()),
                Node::Quotient(a, b) => Expr::quotient(a.subst_rec(f, memo), b.subst_rec(f, memo)),
                Node::Power(a, n) => a.subst_rec(f, memo).powi(*n),
                Node::Elem(g, a) => Expr::elem(*g, a.subst_rec(f, memo)),
            }
        };
        memo.insert(self.key(), out.clone());
        out
    }

    /// Replaces the coordinates (t, x, y) by the given expressions.
    pub fn substitute_coords(&self, by: [&Expr; 3]) -> Expr {
        self.substitute(&|n| match n {
            Node::Coord(v) => Some(by[v.index()].clone()),
            _ => None,
        })
    }

    /// Renames slots; unlisted names are kept.
    pub fn rename_slots(&self, map: &BTreeMap<String, String>) -> Expr {
        self.substitute(&|n| match n {
            Node::Slot { name, deriv, arg } => map.get(name.as_ref()).map(|new| {
                Expr::slot_d(new, *deriv, arg.rename_slots(map))
            }),
            _ => None,
        })
    }

    /// Sum's top-level terms, or the expression itself.
    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            Node::Sum(v) => v.clone(),
            _ => vec![self.clone()],
        }
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Expr {
        Expr::c(v)
    }
}

macro_rules! ops {
    ($lhs:ty, $rhs:ty) => {
        impl Add<$rhs> for $lhs {
            type Output = Expr;
            fn add(self, o: $rhs) -> Expr {
                Expr::sum([to_expr(self), to_expr(o)])
            }
        }
        impl Sub<$rhs> for $lhs {
            type Output = Expr;
            fn sub(self, o: $rhs) -> Expr {
                Expr::sum([to_expr(self), -to_expr(o)])
            }
        }
        impl Mul<$rhs> for $lhs {
            type Output = Expr;
            fn mul(self, o: $rhs) -> Expr {
                Expr::product([to_expr(self), to_expr(o)])
            }
        }
        impl Div<$rhs> for $lhs {
            type Output = Expr;
            fn div(self, o: $rhs) -> Expr {
                Expr::quotient(to_expr(self), to_expr(o))
            }
        }
    };
}

trait IntoExpr {
    fn into_expr(self) -> Expr;
}

impl IntoExpr for Expr {
    fn into_expr(self) -> Expr {
        self
    }
}

impl IntoExpr for &Expr {
    fn into_expr(self) -> Expr {
        self.clone()
    }
}

impl IntoExpr for f64 {
    fn into_expr(self) -> Expr {
        Expr::c(self)
    }
}

fn to_expr(e: impl IntoExpr) -> Expr {
    e.into_expr()
}

ops!(Expr, Expr);
ops!(Expr, &Expr);
ops!(&Expr, Expr);
ops!(&Expr, &Expr);
ops!(Expr, f64);
ops!(&Expr, f64);
ops!(f64, Expr);
ops!(f64, &Expr);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product([Expr::c(-1.0), self])
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_and_flattening() {
        let x = Expr::x();
        let e = (&x + 1.0) + (2.0 + &x);
        match e.node() {
            Node::Sum(v) => assert_eq!(v.len(), 3),
            _ => panic!(),
        }
        assert!((&x * 0.0).is_zero());
        assert_eq!(&x * 1.0, x);
        assert_eq!((Expr::c(2.0) * 3.0).as_const().unwrap().re, 6.0);
        assert_eq!(x.powi(1), x);
        assert!(x.powi(0).is_one());
        assert_eq!(Expr::c(1.0).exp().as_const().unwrap().re, 1f64.exp());
    }

    #[test]
    fn inventory() {
        let e = Expr::h(0, 1, 0) * Expr::h(1, 2, 0) + Expr::slot_d("tau", 2, Expr::t());
        assert_eq!(e.max_field_order(), 3);
        assert_eq!(e.fields().len(), 2);
        assert_eq!(e.slot_names().into_iter().collect::<Vec<_>>(), vec!["tau".to_string()]);
        assert_eq!(e.max_slot_deriv(), 2);
    }
}
