use std::collections::HashMap;

use crate::jet::{MultiIndex, Var};

use super::{ElemFn, Expr, Node};

impl Expr {
    /// Differentiates with a caller-supplied rule for coordinate and field
    /// leaves; everything else follows the chain rule.
    pub fn derive_with(&self, leaf: &dyn Fn(&Node) -> Expr) -> Expr {
        let mut memo = HashMap::new();
        self.derive_rec(leaf, &mut memo)
    }

    fn derive_rec(&self, leaf: &dyn Fn(&Node) -> Expr, memo: &mut HashMap<usize, Expr>) -> Expr {
        if let Some(d) = memo.get(&self.key()) {
            return d.clone();
        }
        let d = match self.node() {
            Node::Coord(_) | Node::Field { .. } => leaf(self.node()),
            Node::Const(_) => Expr::zero(),
            Node::Slot { name, deriv, arg } => {
                let da = arg.derive_rec(leaf, memo);
                if da.is_zero() {
                    Expr::zero()
                } else {
                    Expr::slot_d(name, deriv + 1, arg.clone()) * da
                }
            }
            Node::Sum(v) => Expr::sum(v.iter().map(|e| e.derive_rec(leaf, memo)).collect::<Vec<_>>()),
            Node::Product(v) => {
                let ds: Vec<Expr> = v.iter().map(|e| e.derive_rec(leaf, memo)).collect();
                let mut terms = Vec::new();
                for (i, di) in ds.iter().enumerate() {
                    if di.is_zero() {
                        continue;
                    }
                    let mut fs: Vec<Expr> = Vec::with_capacity(v.len());
                    for (j, f) in v.iter().enumerate() {
                        fs.push(if i == j { di.clone() } else { f.clone() });
                    }
                    terms.push(Expr::product(fs));
                }
                Expr::sum(terms)
            }
            Node::Quotient(a, b) => {
                let da = a.derive_rec(leaf, memo);
                let db = b.derive_rec(leaf, memo);
                let first = Expr::quotient(da, b.clone());
                if db.is_zero() {
                    first
                } else {
                    first - Expr::quotient(a * db, b.powi(2))
                }
            }
            Node::Power(a, n) => {
                let da = a.derive_rec(leaf, memo);
                if da.is_zero() {
                    Expr::zero()
                } else {
                    Expr::product([Expr::c(*n as f64), a.powi(n - 1), da])
                }
            }
            Node::Elem(f, a) => {
                let da = a.derive_rec(leaf, memo);
                if da.is_zero() {
                    Expr::zero()
                } else {
                    match f {
                        ElemFn::Sin => a.cos() * da,
                        ElemFn::Cos => -(a.sin() * da),
                        ElemFn::Exp => self * da,
                        ElemFn::Ln => Expr::quotient(da, a.clone()),
                        ElemFn::Sqrt => Expr::quotient(da, 2.0 * self),
                    }
                }
            }
        };
        memo.insert(self.key(), d.clone());
        d
    }

    /// Total derivative D_dir, chaining through every field.
    pub fn total_derivative(&self, dir: Var) -> Expr {
        self.derive_with(&|n| match n {
            Node::Coord(v) if *v == dir => Expr::one(),
            Node::Coord(_) => Expr::zero(),
            Node::Field { field, index } => Expr::field(*field, index.bump(dir)),
            _ => unreachable!(),
        })
    }

    /// D^a applied in the order t, x, y.
    pub fn total_derivative_multi(&self, a: MultiIndex) -> Expr {
        a.path().into_iter().fold(self.clone(), |e, v| e.total_derivative(v))
    }

    /// Formal partial derivative with respect to the jet coordinate
    /// `index` of `field`.
    pub fn jetvar_partial(&self, field: u8, index: MultiIndex) -> Expr {
        self.derive_with(&|n| match n {
            Node::Field { field: f, index: i } if *f == field && *i == index => Expr::one(),
            _ => Expr::zero(),
        })
    }

    /// Explicit partial derivative in a coordinate, holding jet coordinates
    /// fixed.
    pub fn coord_partial(&self, dir: Var) -> Expr {
        self.derive_with(&|n| match n {
            Node::Coord(v) if *v == dir => Expr::one(),
            _ => Expr::zero(),
        })
    }
}
