//! The forecast equation and its invariant-theoretic representations.

use serde::Serialize;

use crate::check::Residual;
use crate::error::{Error, Result};
use crate::exprs::{EvalContext, Expr, Slots};
use crate::jet::{Jet, MultiIndex, Scalar, SmoothFn, Var};

/// Denominators with modulus below this are rejected as degenerate.
pub const DEGENERACY: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub beta: f64,
    /// Carried for configuration provenance; F does not depend on it.
    pub f0: f64,
}

impl ModelParams {
    pub fn new(beta: f64) -> Self {
        ModelParams { beta, f0: 0.0 }
    }
}

/// Relative vorticity ζ = H_xx + H_yy.
pub fn zeta() -> Expr {
    Expr::h(0, 2, 0) + Expr::h(0, 0, 2)
}

/// F = ζ_t + H_x ζ_y − H_y ζ_x + β H_x.
pub fn f_expr(beta: f64) -> Expr {
    let z = zeta();
    z.total_derivative(Var::T) + Expr::h(0, 1, 0) * z.total_derivative(Var::Y)
        - Expr::h(0, 0, 1) * z.total_derivative(Var::X)
        + beta * Expr::h(0, 1, 0)
}

/// Jet of F of order `order` along the germ `h`.
pub fn residual_f<S: Scalar>(h: &Jet<S>, p: &ModelParams, order: usize) -> Result<Jet<S>> {
    if h.order() < 3 + order {
        return Err(Error::OrderExceeded {
            needed: 3 + order,
            available: h.order(),
        });
    }
    f_expr(p.beta).eval_on(h, &Slots::new(), order)
}

/// |F| at the germ with the magnitude of its terms.
pub fn residual_f_scaled<S: Scalar>(h: &Jet<S>, beta: f64) -> Result<Residual> {
    let slots = Slots::new();
    let (v, scale) = f_expr(beta).eval_scaled(&EvalContext::new(std::slice::from_ref(h), &slots))?;
    Ok(Residual::new(v.modulus(), scale))
}

/// Invariant differentiation operators for β ≠ 0 with arbitrary f(t),
/// read from the slot named `f`.
pub fn delta1(e: &Expr) -> Expr {
    let ratio = Expr::x() * Expr::slot_d("f", 1, Expr::t()) / Expr::slot("f", Expr::t());
    e.total_derivative(Var::T) + ratio * e.total_derivative(Var::X)
}

pub fn delta2(e: &Expr) -> Expr {
    e.total_derivative(Var::X)
}

pub fn delta3(e: &Expr) -> Expr {
    e.total_derivative(Var::Y)
}

/// Basis invariants for β ≠ 0 and the derived invariants b3, b4, b5,
/// both via the δ-formulas and via their direct derivative formulas.
pub struct InvariantBasis {
    pub b01: Expr,
    pub b02: Expr,
    pub b1: Expr,
    pub b2: Expr,
    pub b3: Expr,
    pub b4: Expr,
    pub b5: Expr,
    pub b3_direct: Expr,
    pub b4_direct: Expr,
    pub b5_direct: Expr,
    /// Denominators of the δ-formulas.
    pub denominators: Vec<Expr>,
}

impl InvariantBasis {
    pub fn new() -> Self {
        let b1 = Expr::h(0, 1, 0);
        let b2 = Expr::h(0, 0, 1) * Expr::h(0, 2, 0) - Expr::h(1, 1, 0);
        let d2b1 = delta2(&b1);
        let d3b1 = delta3(&b1);
        let d22b1 = delta2(&d2b1);
        let d23b1 = delta2(&d3b1);
        let b3 = Expr::quotient(delta1(&d3b1) + delta3(&b2), d2b1.clone())
            + Expr::quotient(
                (&d2b1 * &d3b1 - delta1(&d2b1) - delta2(&b2)) * &d23b1,
                &d2b1 * &d22b1,
            );
        let b4 = &d23b1 + delta3(&b3);
        let d22b3 = delta2(&delta2(&b3));
        let b5 = (2.0 * &b3 * &d23b1 + delta3(&b3) * &d2b1 - delta3(&delta3(&b2)) - delta1(&delta2(&b3)))
            * Expr::quotient(delta3(&d3b1), d22b3.clone())
            + &d3b1 * &d2b1
            + delta1(&b3)
            - delta2(&b2);
        InvariantBasis {
            b01: Expr::t(),
            b02: Expr::y(),
            b1,
            b2,
            b3,
            b4,
            b5,
            b3_direct: Expr::h(0, 0, 2),
            b4_direct: Expr::h(0, 2, 1) + Expr::h(0, 0, 3),
            b5_direct: Expr::h(1, 2, 0) + Expr::h(1, 0, 2)
                - (Expr::h(0, 3, 0) + Expr::h(0, 1, 2)) * Expr::h(0, 0, 1),
            denominators: vec![d2b1, d22b1, d22b3],
        }
    }

    /// (b4 + β) b1 + b5, with b4, b5 from their δ-formulas.
    pub fn equation(&self, beta: f64) -> Expr {
        (&self.b4 + beta) * &self.b1 + &self.b5
    }
}

impl Default for InvariantBasis {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RepresentationResidual {
    /// |(b4+β)b1 + b5 − F|.
    pub equation: Residual,
    pub b3: Residual,
    pub b4: Residual,
    pub b5: Residual,
    /// Values of b3, b4, b5 from the δ-formulas.
    pub values: [f64; 3],
}

impl RepresentationResidual {
    pub fn passes(&self, tol: f64) -> bool {
        [self.equation, self.b3, self.b4, self.b5].iter().all(|r| r.passes(tol))
    }
}

fn diff_residual(a: &Expr, b: &Expr, ctx: &EvalContext<f64>) -> Result<Residual> {
    let (v, s) = (a - b).eval_scaled(ctx)?;
    Ok(Residual::new(v.abs(), s))
}

fn f_slots(f: &SmoothFn) -> Slots {
    let mut s = Slots::new();
    s.insert("f".into(), f.clone());
    s
}

/// Checks the β ≠ 0 representation and the δ-formulas for b3, b4, b5.
/// The germ must have order ≥ 5.
pub fn invariant_representation_check(
    h: &Jet<f64>,
    p: &ModelParams,
    f: &SmoothFn,
) -> Result<RepresentationResidual> {
    if p.beta == 0.0 {
        return Err(Error::RegimeMismatch("the β ≠ 0 basis needs β ≠ 0".into()));
    }
    let basis = InvariantBasis::new();
    let slots = f_slots(f);
    let ctx = EvalContext::new(std::slice::from_ref(h), &slots);
    if f.eval(h.point()[0])?.abs() < DEGENERACY {
        return Err(Error::domain("f vanishes at the sample point"));
    }
    for d in &basis.denominators {
        let v = d.evaluate(&ctx, 0)?.value();
        if v.abs() < DEGENERACY {
            return Err(Error::DegenerateGerm(format!("denominator {d} = {v:e}")));
        }
    }
    let value = |e: &Expr| -> Result<f64> { Ok(e.evaluate(&ctx, 0)?.value()) };
    Ok(RepresentationResidual {
        equation: diff_residual(&basis.equation(p.beta), &crate::model::f_expr(p.beta), &ctx)?,
        b3: diff_residual(&basis.b3, &basis.b3_direct, &ctx)?,
        b4: diff_residual(&basis.b4, &basis.b4_direct, &ctx)?,
        b5: diff_residual(&basis.b5, &basis.b5_direct, &ctx)?,
        values: [value(&basis.b3)?, value(&basis.b4)?, value(&basis.b5)?],
    })
}

/// Operators δ⁰ for β = 0, built from slots `phi` and `psi`.
pub fn delta0(e: &Expr) -> [Expr; 3] {
    let phi = Expr::slot("phi", Expr::t());
    let a = Expr::x() * Expr::slot_d("phi", 1, Expr::t()) / &phi;
    let b = Expr::x() * Expr::slot_d("psi", 1, Expr::t()) / &phi;
    let dx = e.total_derivative(Var::X);
    let dy = e.total_derivative(Var::Y);
    [
        e.total_derivative(Var::T) + &a * &dx + &b * &dy,
        (Expr::h(0, 0, 1) + a) * dx,
        (Expr::h(0, 1, 0) - b) * dy,
    ]
}

/// The β = 0 representation of the equation in the basis t, H_xx, H_xy, H_yy,
/// and its denominator δ⁰₃b⁰₁.
pub fn beta0_representation() -> (Expr, Expr) {
    let b1 = Expr::h(0, 2, 0);
    let b2 = Expr::h(0, 1, 1);
    let b3 = Expr::h(0, 0, 2);
    let [d1b1, d2b1, d3b1] = delta0(&b1);
    let [d1b3, _, d3b3] = delta0(&b3);
    let [_, d2b2, d3b2] = delta0(&b2);
    let repr = d1b1 - d2b1 + &d3b1 + d1b3 + d3b3 - Expr::quotient(d2b2 * d3b2, d3b1.clone());
    (repr, d3b1)
}

fn beta0_slots(phi: &SmoothFn, psi: &SmoothFn) -> Slots {
    let mut s = Slots::new();
    s.insert("phi".into(), phi.clone());
    s.insert("psi".into(), psi.clone());
    s
}

fn beta0_guard(h: &Jet<f64>, slots: &Slots) -> Result<Expr> {
    let (repr, den) = beta0_representation();
    let ctx = EvalContext::new(std::slice::from_ref(h), slots);
    if slots["phi"].eval(h.point()[0])?.abs() < DEGENERACY {
        return Err(Error::domain("phi vanishes at the sample point"));
    }
    let d = den.evaluate(&ctx, 0)?.value();
    if d.abs() < DEGENERACY {
        return Err(Error::DegenerateGerm(format!("δ⁰₃b⁰₁ = {d:e}")));
    }
    Ok(repr)
}

/// Value of the β = 0 representation at the germ (≈ 0 on solutions).
pub fn beta0_representation_check(h: &Jet<f64>, phi: &SmoothFn, psi: &SmoothFn) -> Result<Residual> {
    let slots = beta0_slots(phi, psi);
    let repr = beta0_guard(h, &slots)?;
    let (v, s) = repr.eval_scaled(&EvalContext::new(std::slice::from_ref(h), &slots))?;
    Ok(Residual::new(v.abs(), s))
}

/// |representation − F|β=0| at an arbitrary germ.
pub fn beta0_identity_check(h: &Jet<f64>, phi: &SmoothFn, psi: &SmoothFn) -> Result<Residual> {
    let slots = beta0_slots(phi, psi);
    let repr = beta0_guard(h, &slots)?;
    diff_residual(&repr, &f_expr(0.0), &EvalContext::new(std::slice::from_ref(h), &slots))
}

/// Residuals of [δ1,δ2]e + (f′/f)δ2 e, [δ1,δ3]e, [δ2,δ3]e.
pub fn delta_commutator_check(h: &Jet<f64>, f: &SmoothFn, e: &Expr) -> Result<[Residual; 3]> {
    let slots = f_slots(f);
    if f.eval(h.point()[0])?.abs() < DEGENERACY {
        return Err(Error::domain("f vanishes at the sample point"));
    }
    let ratio = Expr::slot_d("f", 1, Expr::t()) / Expr::slot("f", Expr::t());
    let c12 = delta1(&delta2(e)) - delta2(&delta1(e)) + ratio * delta2(e);
    let c13 = delta1(&delta3(e)) - delta3(&delta1(e));
    let c23 = delta2(&delta3(e)) - delta3(&delta2(e));
    let ctx = EvalContext::new(std::slice::from_ref(h), &slots);
    let r = |x: &Expr| -> Result<Residual> {
        let (v, s) = x.eval_scaled(&ctx)?;
        Ok(Residual::new(v.abs(), s))
    };
    Ok([r(&c12)?, r(&c13)?, r(&c23)?])
}

/// Multi-indices whose values must be well away from zero for the β ≠ 0
/// δ-formulas.
pub const BASIS_GUARDS: [MultiIndex; 3] = [
    MultiIndex::new(0, 2, 0),
    MultiIndex::new(0, 3, 0),
    MultiIndex::new(0, 2, 2),
];
