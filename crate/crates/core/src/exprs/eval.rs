use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar, MAX_ORDER};

use super::{ElemFn, Expr, Node, Slots};

/// Everything needed to evaluate an expression along a germ.
pub struct EvalContext<'a, S: Scalar> {
    /// Germs of the unknown fields, all expanded at the same point.
    pub fields: &'a [Jet<S>],
    pub slots: &'a Slots,
    pub point: [f64; 3],
}

impl<'a, S: Scalar> EvalContext<'a, S> {
    pub fn new(fields: &'a [Jet<S>], slots: &'a Slots) -> Self {
        let point = fields.first().map(|j| j.point()).unwrap_or([0.0; 3]);
        EvalContext { fields, slots, point }
    }

    pub fn at(point: [f64; 3], slots: &'a Slots) -> Self {
        EvalContext {
            fields: &[],
            slots,
            point,
        }
    }
}

impl Expr {
    /// Jet of order `order` of the scalar field this expression defines.
    pub fn evaluate<S: Scalar>(&self, ctx: &EvalContext<S>, order: usize) -> Result<Jet<S>> {
        if order > MAX_ORDER {
            return Err(Error::OrderExceeded {
                needed: order,
                available: MAX_ORDER,
            });
        }
        let mut memo = HashMap::new();
        self.eval_rec(ctx, order, &mut memo)
    }

    /// Shorthand for a single germ of H.
    pub fn eval_on<S: Scalar>(&self, h: &Jet<S>, slots: &Slots, order: usize) -> Result<Jet<S>> {
        self.evaluate(&EvalContext::new(std::slice::from_ref(h), slots), order)
    }

    /// Value at the point together with Σ|top-level terms|.
    pub fn eval_scaled<S: Scalar>(&self, ctx: &EvalContext<S>) -> Result<(S, f64)> {
        let mut memo = HashMap::new();
        let mut total = S::zero();
        let mut scale = 0.0;
        for t in self.terms() {
            let v = t.eval_rec(ctx, 0, &mut memo)?.value();
            scale += v.modulus();
            total += v;
        }
        Ok((total, scale))
    }

    fn eval_rec<S: Scalar>(
        &self,
        ctx: &EvalContext<S>,
        order: usize,
        memo: &mut HashMap<usize, Jet<S>>,
    ) -> Result<Jet<S>> {
        if let Some(j) = memo.get(&self.key()) {
            return Ok(j.clone());
        }
        let out = match self.node() {
            Node::Coord(v) => Jet::seed(ctx.point, *v, order),
            Node::Const(z) => Jet::constant(S::from_complex(*z)?, ctx.point, order),
            Node::Field { field, index } => {
                let g = ctx.fields.get(*field as usize).ok_or_else(|| {
                    Error::Invalid(format!("no germ supplied for field {field}"))
                })?;
                let need = index.degree() + order;
                if need > g.order() {
                    return Err(Error::OrderExceeded {
                        needed: need,
                        available: g.order(),
                    });
                }
                g.extract_jet(*index)?.truncate(order)?
            }
            Node::Slot { name, deriv, arg } => {
                let f = ctx
                    .slots
                    .get(name.as_ref())
                    .ok_or_else(|| Error::MissingSlot(name.to_string()))?;
                let a = arg.eval_rec(ctx, order, memo)?;
                let d = *deriv as usize;
                if d + order > MAX_ORDER {
                    return Err(Error::OrderExceeded {
                        needed: d + order,
                        available: MAX_ORDER,
                    });
                }
                let ds = f.derivatives(a.value(), d + order)?;
                a.compose(&ds[d..])
            }
            Node::Sum(v) => {
                let mut acc = v[0].eval_rec(ctx, order, memo)?;
                for e in &v[1..] {
                    acc = &acc + &e.eval_rec(ctx, order, memo)?;
                }
                acc
            }
            Node::Product(v) => {
                let mut acc = v[0].eval_rec(ctx, order, memo)?;
                for e in &v[1..] {
                    acc = &acc * &e.eval_rec(ctx, order, memo)?;
                }
                acc
            }
            Node::Quotient(a, b) => {
                let a = a.eval_rec(ctx, order, memo)?;
                let b = b.eval_rec(ctx, order, memo)?;
                a.try_div(&b)?
            }
            Node::Power(a, n) => a.eval_rec(ctx, order, memo)?.powi(*n)?,
            Node::Elem(f, a) => {
                let a = a.eval_rec(ctx, order, memo)?;
                match f {
                    ElemFn::Sin => a.sin(),
                    ElemFn::Cos => a.cos(),
                    ElemFn::Exp => a.exp(),
                    ElemFn::Ln => a.ln()?,
                    ElemFn::Sqrt => a.sqrt()?,
                }
            }
        };
        memo.insert(self.key(), out.clone());
        Ok(out)
    }
}
