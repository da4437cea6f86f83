//! Group foliation: automorphic and resolving systems, reduced
//! resolving systems and the Cartan involutivity audit.
//!
//! Resolving-system expressions use the coordinate slots (t, x, y) for the
//! variables (t, y, h); fields 0..3 are U, V, W, Z.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::check::{Residual, Sampler, Summary, DENOM_FLOOR, IDENTITY_TOL};
use crate::error::{Error, Result};
use crate::exprs::{EvalContext, Expr, Node, Slots};
use crate::jet::{Jet, MultiIndex, Scalar, SmoothFn, Var};

pub const U: u8 = 0;
pub const V: u8 = 1;
pub const W: u8 = 2;
pub const Z: u8 = 3;

/// (t, y, h) as expressions.
pub fn vars() -> (Expr, Expr, Expr) {
    (Expr::t(), Expr::x(), Expr::y())
}

const VAR_T: Var = Var::T;
const VAR_Y: Var = Var::X;
const VAR_H: Var = Var::Y;

fn d(f: u8, v: Var) -> Expr {
    Expr::field(f, MultiIndex::unit(v))
}

fn fld(f: u8) -> Expr {
    Expr::field(f, MultiIndex::ZERO)
}

/// The five resolving-system equations.
pub fn resolving_system(beta: f64) -> [Expr; 5] {
    let (u, v, w, z) = (fld(U), fld(V), fld(W), fld(Z));
    let h = Expr::y();
    [
        d(V, VAR_Y) + &w * d(V, VAR_H) - &v * d(W, VAR_H),
        d(W, VAR_Y) + &w * d(W, VAR_H) - &v * d(Z, VAR_H),
        d(V, VAR_T) + &v * d(U, VAR_H) - &u * d(V, VAR_H) - &v * &w,
        d(W, VAR_T) + d(U, VAR_Y) + &w * d(U, VAR_H) - &u * d(W, VAR_H) - &v * &z,
        d(Z, VAR_T) - &u * d(Z, VAR_H) - &v * d(U, VAR_H)
            + (&w * d(Z, VAR_H) + &v * d(W, VAR_H) + d(Z, VAR_Y) + beta) * &h
            + &v * &w,
    ]
}

/// U, V, W, Z as expressions in (t, y, h).
#[derive(Clone, Debug)]
pub struct ResolvingState {
    pub u: Expr,
    pub v: Expr,
    pub w: Expr,
    pub z: Expr,
    pub slots: Slots,
}

impl ResolvingState {
    pub fn new(u: Expr, v: Expr, w: Expr, z: Expr, slots: Slots) -> Self {
        ResolvingState { u, v, w, z, slots }
    }

    fn parts(&self) -> [&Expr; 4] {
        [&self.u, &self.v, &self.w, &self.z]
    }

    fn germs<S: Scalar>(&self, point: [f64; 3], order: usize) -> Result<Vec<Jet<S>>> {
        let ctx = EvalContext::at(point, &self.slots);
        self.parts().iter().map(|e| e.evaluate(&ctx, order)).collect()
    }

    /// The (κ, ν, ρ) family.
    pub fn wave(kappa: f64, nu: f64, rho: f64, beta: f64) -> Self {
        let (_, _, h) = vars();
        let s = (rho * rho * kappa * kappa - h.powi(2)).sqrt();
        let k2 = kappa * kappa + nu * nu;
        ResolvingState::new(
            (beta * kappa / k2 - nu * &h) * &s,
            -kappa * &s,
            -nu * &s,
            -(nu * nu / kappa) * &s,
            Slots::new(),
        )
    }

    pub fn trivial(z0: f64) -> Self {
        ResolvingState::new(Expr::zero(), Expr::zero(), Expr::zero(), Expr::c(z0), Slots::new())
    }
}

/// Residuals of the resolving system at `point` = (t, y, h).
pub fn resolving_residuals<S: Scalar>(s: &ResolvingState, beta: f64, point: [f64; 3]) -> Result<[Residual; 5]> {
    let germs: Vec<Jet<S>> = s.germs(point, 1)?;
    let ctx = EvalContext::new(&germs, &s.slots);
    let mut out = [Residual::new(0.0, 0.0); 5];
    for (i, e) in resolving_system(beta).iter().enumerate() {
        let (v, scale) = e.eval_scaled(&ctx)?;
        out[i] = Residual::new(v.modulus(), scale);
    }
    Ok(out)
}

/// Residuals of H_yH_xx − H_tx = U, H_xx = V, H_xy = W, H_yy = Z at
/// `point` = (t, x, y), with h = H_x.
pub fn automorphic_residuals(h: &Expr, hslots: &Slots, s: &ResolvingState, point: [f64; 3]) -> Result<[Residual; 4]> {
    let g: Jet<f64> = h.evaluate(&EvalContext::at(point, hslots), 2)?;
    let at = |i, j, k| g.get(MultiIndex::new(i, j, k));
    let hx = at(0, 1, 0);
    let q: Vec<Jet<f64>> = s.germs([point[0], point[2], hx], 0)?;
    let lhs = [
        (at(0, 0, 1) * at(0, 2, 0) - at(1, 1, 0), (at(0, 0, 1) * at(0, 2, 0)).abs() + at(1, 1, 0).abs()),
        (at(0, 2, 0), at(0, 2, 0).abs()),
        (at(0, 1, 1), at(0, 1, 1).abs()),
        (at(0, 0, 2), at(0, 0, 2).abs()),
    ];
    let mut out = [Residual::new(0.0, 0.0); 4];
    for i in 0..4 {
        let rhs = q[i].value();
        out[i] = Residual::new((lhs[i].0 - rhs).abs(), lhs[i].1 + rhs.abs());
    }
    Ok(out)
}

/// Automorphic check at random points. With `branch`, only points where
/// H_xx and V share a sign are used, selecting the square-root branch of
/// the state.
pub fn automorphic_check(
    h: &Expr,
    hslots: &Slots,
    state: &ResolvingState,
    branch: bool,
    points: usize,
    s: &mut Sampler,
) -> Result<(Summary, usize)> {
    let mut summary = Summary::new(IDENTITY_TOL);
    let mut rejected = 0;
    let mut n = 0;
    while n < points {
        if rejected > 100 * points.max(1) {
            return Err(Error::domain("no admissible points on the branch"));
        }
        let p = crate::solutions::sample_point(s);
        let r = match automorphic_residuals(h, hslots, state, p) {
            Ok(r) => r,
            Err(Error::Domain(_)) => {
                rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if branch {
            let g: Jet<f64> = h.evaluate(&EvalContext::at(p, hslots), 2)?;
            let hxx = g.get(MultiIndex::new(0, 2, 0));
            let v: Jet<f64> = state.v.evaluate(&EvalContext::at([p[0], p[2], g.get(MultiIndex::new(0, 1, 0))], &state.slots), 0)?;
            if hxx * v.value() <= 0.0 || v.value().abs() < DENOM_FLOOR {
                rejected += 1;
                continue;
            }
        }
        for x in r {
            summary.push(x);
        }
        n += 1;
    }
    Ok((summary, rejected))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Subalgebra {
    Y1Y2,
    Y1Y3,
    Y2Y3,
    Y1,
    Y2,
    Y3,
    /// Y1 + αY2 with α = ±1.
    Y1pmY2(f64),
}

impl Subalgebra {
    pub fn name(&self) -> String {
        match self {
            Subalgebra::Y1pmY2(a) if *a > 0.0 => "Y1+Y2".into(),
            Subalgebra::Y1pmY2(_) => "Y1-Y2".into(),
            other => format!("{other:?}"),
        }
    }

    fn two_vars(&self) -> bool {
        matches!(self, Subalgebra::Y1 | Subalgebra::Y2 | Subalgebra::Y3 | Subalgebra::Y1pmY2(_))
    }
}

/// Reduced functions (Ũ, Ṽ, W̃, Z̃) written in the invariant variables,
/// which occupy the x (first) and y (second) coordinate slots.
#[derive(Clone, Debug)]
pub struct ReducedCandidate {
    pub subalgebra: Subalgebra,
    pub funcs: [Expr; 4],
    pub slots: Slots,
}

fn uses_coord(e: &Expr, v: Var) -> bool {
    let mut found = false;
    e.visit(&mut |n| {
        if matches!(n, Node::Coord(c) if c == &v) {
            found = true;
        }
    });
    found
}

impl ReducedCandidate {
    /// Lifts the reduced functions through the subalgebra's ansatz.
    pub fn to_state(&self) -> Result<ResolvingState> {
        for f in &self.funcs {
            if uses_coord(f, Var::T) || (!self.subalgebra.two_vars() && uses_coord(f, Var::Y)) {
                return Err(Error::AnsatzMismatch(format!(
                    "{}: reduced functions may depend only on the invariants",
                    self.subalgebra.name()
                )));
            }
        }
        let (t, y, h) = vars();
        let one = Expr::one();
        let (r1, r2, pre) = match self.subalgebra {
            Subalgebra::Y1Y2 => (h.clone(), Expr::zero(), [one.clone(), one.clone(), one.clone(), one.clone()]),
            Subalgebra::Y1Y3 => (
                &h / y.powi(2),
                Expr::zero(),
                [y.powi(3), y.clone(), y.clone(), y.clone()],
            ),
            Subalgebra::Y2Y3 => {
                let ti = t.powi(-1);
                (t.powi(2) * &h, Expr::zero(), [t.powi(-3), ti.clone(), ti.clone(), ti])
            }
            Subalgebra::Y1 => (y.clone(), h.clone(), [one.clone(), one.clone(), one.clone(), one.clone()]),
            Subalgebra::Y2 => (t.clone(), h.clone(), [one.clone(), one.clone(), one.clone(), one.clone()]),
            Subalgebra::Y3 => {
                let ti = t.powi(-1);
                (&t * &y, t.powi(2) * &h, [t.powi(-3), ti.clone(), ti.clone(), ti])
            }
            Subalgebra::Y1pmY2(a) => (&y - a * &t, h.clone(), [one.clone(), one.clone(), one.clone(), one]),
        };
        let lift = |i: usize| &pre[i] * self.funcs[i].substitute_coords([&Expr::t(), &r1, &r2]);
        Ok(ResolvingState::new(lift(0), lift(1), lift(2), lift(3), self.slots.clone()))
    }
}

/// A listed reduced solution with its sampling box in (t, y, h).
#[derive(Clone, Debug)]
pub struct NamedCandidate {
    pub name: &'static str,
    /// Printed as in the source, or a corrected variant.
    pub printed: bool,
    pub candidate: ReducedCandidate,
    /// Indices of the resolving equations that are checked.
    pub equations: Vec<usize>,
    pub complex: bool,
    pub sample_box: [(f64, f64); 3],
}

const BOX: [(f64, f64); 3] = [(0.5, 1.5), (-1.0, 1.0), (-1.0, 1.0)];

/// All listed reduced solutions, with random admissible constants.
pub fn reduced_candidates(beta: f64, s: &mut Sampler) -> Vec<NamedCandidate> {
    let b = beta;
    let (r1, r2) = (Expr::x(), Expr::y());
    let i = Expr::i();
    let zero = Expr::zero;
    let all = vec![0, 1, 2, 3, 4];
    let mut out = Vec::new();
    let mut push = |name, printed, sub, funcs: [Expr; 4], slots: Slots, eqs: &Vec<usize>, complex, bx| {
        out.push(NamedCandidate {
            name,
            printed,
            candidate: ReducedCandidate {
                subalgebra: sub,
                funcs,
                slots,
            },
            equations: eqs.clone(),
            complex,
            sample_box: bx,
        })
    };

    let mut zs = Slots::new();
    zs.insert("Z".into(), SmoothFn::id().powi(2));
    let zr = Expr::slot("Z", r1.clone());
    let zp = Expr::slot_d("Z", 1, r1.clone());
    push("Y1Y2.i", true, Subalgebra::Y1Y2, [b * &r1 / zp, zero(), zero(), zr], zs, &all, false, BOX);

    let (c1, c2, c3) = (s.uniform(0.5, 1.0), s.uniform(0.5, 1.0), s.uniform(-1.0, 1.0));
    let zz = c3 - b * &r1 / c2 - b * (c1 * c2 * &r1 - 1.0).ln() / (c1 * c2 * c2);
    push(
        "Y1Y2.ii",
        true,
        Subalgebra::Y1Y2,
        [Expr::c(1.0 / c1), zero(), Expr::c(c2), zz],
        Slots::new(),
        &all,
        false,
        [BOX[0], BOX[1], (1.2 / (c1 * c2), 3.0 / (c1 * c2))],
    );

    let (c1, c2, c3) = (s.sign() * s.uniform(0.5, 1.5), s.uniform(1.5, 2.5), s.uniform(-1.0, 1.0));
    let sq = (c2 - r1.powi(2)).sqrt();
    let k2 = c1 * c1 + c3 * c3;
    let vwz = |sq: &Expr| [c1 * sq, c3 * sq, c3 * c3 / c1 * sq];
    let [v, w, z] = vwz(&sq);
    push(
        "Y1Y2.iii",
        true,
        Subalgebra::Y1Y2,
        [(c3 + c1 * b * &r1 / k2) * &sq, v.clone(), w.clone(), z.clone()],
        Slots::new(),
        &all,
        false,
        BOX,
    );
    push(
        "Y1Y2.iii-corrected",
        false,
        Subalgebra::Y1Y2,
        [(c3 * &r1 - c1 * b / k2) * &sq, v, w, z],
        Slots::new(),
        &all,
        false,
        BOX,
    );

    let w0 = s.uniform(1.0, 1.5);
    let sq = (w0 * w0 - 2.0 * &r1).sqrt();
    push(
        "Y1Y3.i",
        true,
        Subalgebra::Y1Y3,
        [
            w0 * w0 * (2.0 * &r1 - w0 * w0) + w0 * b / 2.0 * &sq,
            -w0 * &sq,
            Expr::c(w0 * w0),
            (w0.powi(3) - 2.0 * w0 * &r1) / &sq - b,
        ],
        Slots::new(),
        &all,
        false,
        [BOX[0], (0.5, 1.5), (-1.0, 0.2)],
    );

    let c1 = s.uniform(-1.0, 1.0);
    push(
        "Y1Y3.ii",
        true,
        Subalgebra::Y1Y3,
        [(r1.powi(2) - c1 * (b + c1)) / 2.0, Expr::c(c1), r1.clone(), Expr::c(-b - c1)],
        Slots::new(),
        &all,
        false,
        [BOX[0], (0.5, 1.5), BOX[2]],
    );

    let mut zs = Slots::new();
    zs.insert("Zt".into(), (SmoothFn::id() * 0.5).exp() + SmoothFn::id());
    let zt = Expr::slot("Zt", r1.clone());
    let ztp = Expr::slot_d("Zt", 1, r1.clone());
    push(
        "Y2Y3.i",
        true,
        Subalgebra::Y2Y3,
        [2.0 * &r1 - (&zt - b * &r1) / ztp, zero(), zero(), zt],
        zs,
        &all,
        false,
        BOX,
    );

    let (c1, c2) = (s.uniform(0.5, 1.5), s.uniform(-0.5, -0.1));
    push(
        "Y2Y3.ii",
        true,
        Subalgebra::Y2Y3,
        [
            &r1 + c2,
            zero(),
            Expr::c(c1),
            b * (c2 - &r1) / c1 + ((c1 + 1.0) * &r1 - c2).powf(1.0 / (c1 + 1.0)),
        ],
        Slots::new(),
        &all,
        false,
        [BOX[0], BOX[1], (0.0, 1.0)],
    );

    let mut ms = Slots::new();
    ms.insert("mu".into(), random_entire(s));
    push(
        "Y1.i",
        true,
        Subalgebra::Y1,
        [zero(), zero(), zero(), Expr::slot("mu", r2.clone()) - b * &r1],
        ms,
        &all,
        false,
        BOX,
    );

    let (c1, c2) = (s.uniform(1.5, 2.5), s.uniform(-1.0, 1.0));
    push(
        "Y1.ii",
        true,
        Subalgebra::Y1,
        [r2.powi(2) / (&r1 + c1), zero(), &r2 / (&r1 + c1), 2.0 * c2 * r2.ln() - b * &r1],
        Slots::new(),
        &all,
        false,
        [BOX[0], BOX[1], (0.2, 1.5)],
    );

    let c1 = s.sign() * s.uniform(0.5, 1.5);
    let (c3, c4, c5) = (s.uniform(0.1, 1.0), s.uniform(-1.0, 1.0), s.uniform(-1.0, 1.0));
    let sq = (r2.powi(2) + c3).sqrt();
    let (ep, em) = ((c1 * &r1).exp(), (-c1 * &r1).exp());
    push(
        "Y1.iii",
        true,
        Subalgebra::Y1,
        [
            &sq / c1 * (c4 * &ep + c5 * &em + b),
            c1 * &sq,
            zero(),
            (c4 * &ep - c5 * &em) / c1,
        ],
        Slots::new(),
        &all,
        false,
        BOX,
    );

    // Y2 with W = σ1 = 1/(1 + C1e^{−t}), q = C2, Q = 0. The printed Z uses
    // I = W exp(−∫W) = e^t/(e^t + C1)²; antiderivatives taken with zero
    // constants.
    let (c1, c2) = (s.uniform(0.2, 2.0), s.uniform(-1.0, 1.0));
    let t = r1.clone();
    let et = t.exp();
    let emt = (-&t).exp();
    let sigma = Expr::one() / (1.0 + c1 * &emt);
    let u = c2 - (1.0 - &sigma) * &r2;
    let ii = &et / (&et + c1).powi(2);
    let int_qi = -c2 / (&et + c1);
    let int_inv_i = &et + 2.0 * c1 * &t - c1 * c1 * &emt;
    let int_nested = c2
        * ((2.0 * &t).exp() / 2.0 + 2.0 * c1 * &t * &et + 2.0 * c1 * c1 * t.powi(2) - 2.0 * c1.powi(3) * &t * &emt
            + c1.powi(4) * (-2.0 * &t).exp() / 2.0);
    let z_printed = -b * ((&r2 * &ii + int_qi) * int_inv_i - int_nested);
    push(
        "Y2",
        true,
        Subalgebra::Y2,
        [u.clone(), zero(), sigma.clone(), z_printed],
        Slots::new(),
        &all,
        false,
        BOX,
    );
    push(
        "Y2-corrected",
        false,
        Subalgebra::Y2,
        [u, zero(), sigma, -b * (&r2 + c2 * (&t - 1.0))],
        Slots::new(),
        &all,
        false,
        BOX,
    );

    let k = Expr::complex(Complex64::new(s.uniform(-1.0, 1.0), s.uniform(-1.0, 1.0)));
    let (z, w) = (r1.clone(), r2.clone());
    let u_printed = (&k - b * z.powi(2) / 2.0) * &w - &w * w.ln();
    let rest = [w.clone(), &i * &w, -b * &z - &w];
    push(
        "Y3",
        true,
        Subalgebra::Y3,
        [u_printed.clone(), rest[0].clone(), rest[1].clone(), rest[2].clone()],
        Slots::new(),
        &all,
        true,
        [BOX[0], BOX[1], (0.2, 1.0)],
    );
    push(
        "Y3-corrected",
        false,
        Subalgebra::Y3,
        [u_printed + &i * w.powi(2), rest[0].clone(), rest[1].clone(), rest[2].clone()],
        Slots::new(),
        &all,
        true,
        [BOX[0], BOX[1], (0.2, 1.0)],
    );

    let alpha = s.sign();
    let c1 = s.uniform(2.5, 3.5);
    let mut ps = Slots::new();
    ps.insert("psi".into(), random_entire(s));
    let wl = &r2 / (&r1 + c1);
    push(
        "Y1pmY2.partial",
        true,
        Subalgebra::Y1pmY2(alpha),
        [(&r1 + c1) * Expr::slot("psi", wl.clone()) + alpha * &wl, zero(), wl, zero()],
        ps,
        &vec![0, 1, 2, 3],
        false,
        BOX,
    );
    out
}

fn random_entire(s: &mut Sampler) -> SmoothFn {
    crate::solutions::random_smooth(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedReport {
    pub name: String,
    pub subalgebra: String,
    pub printed: bool,
    pub equations: Vec<usize>,
    pub rejected_points: usize,
    #[serde(flatten)]
    pub summary: Summary,
}

/// Residuals of the resolving system for the lifted candidate at
/// `points` random points of its sampling box.
pub fn reduced_system_check(c: &NamedCandidate, beta: f64, points: usize, s: &mut Sampler) -> Result<ReducedReport> {
    let state = c.candidate.to_state()?;
    let mut summary = Summary::new(IDENTITY_TOL);
    let mut rejected = 0;
    let mut n = 0;
    while n < points {
        let p = [
            s.uniform(c.sample_box[0].0, c.sample_box[0].1),
            s.uniform(c.sample_box[1].0, c.sample_box[1].1),
            s.uniform(c.sample_box[2].0, c.sample_box[2].1),
        ];
        let r = if c.complex {
            resolving_residuals::<Complex64>(&state, beta, p)
        } else {
            resolving_residuals::<f64>(&state, beta, p)
        };
        match r {
            Ok(r) => {
                for &i in &c.equations {
                    summary.push(r[i]);
                }
                n += 1;
            }
            Err(Error::Domain(_)) => {
                rejected += 1;
                if rejected > 100 * points.max(1) {
                    return Err(Error::domain(format!("{}: no admissible points", c.name)));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ReducedReport {
        name: c.name.to_string(),
        subalgebra: c.candidate.subalgebra.name(),
        printed: c.printed,
        equations: c.equations.clone(),
        rejected_points: rejected,
        summary,
    })
}

/// Numerical rank data of the Cartan test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartanAudit {
    pub ranks: [usize; 4],
    pub taus: [i64; 3],
    pub characters: [i64; 2],
    pub cartan_numbers: [i64; 2],
    pub pass: bool,
}

pub const RANK_TOL: f64 = 1e-8;

pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&v| v > RANK_TOL * top).count()
}

fn jacobian(eqs: &[Expr], wrt: &[(u8, MultiIndex)], ctx: &EvalContext<f64>) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(eqs.len(), wrt.len());
    for (i, e) in eqs.iter().enumerate() {
        for (j, &(f, a)) in wrt.iter().enumerate() {
            let p = e.jetvar_partial(f, a);
            m[(i, j)] = p.evaluate(ctx, 0)?.value();
        }
    }
    Ok(m)
}

fn unit_rows(cols: &[(u8, MultiIndex)], dir: Var) -> DMatrix<f64> {
    let picks: Vec<usize> = (0..cols.len()).filter(|&j| cols[j].1 == MultiIndex::unit(dir)).collect();
    let mut m = DMatrix::zeros(picks.len(), cols.len());
    for (r, &j) in picks.iter().enumerate() {
        m[(r, j)] = 1.0;
    }
    m
}

fn stack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    m.rows_mut(0, a.nrows()).copy_from(a);
    m.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    m
}

/// Ranks (base, t-augmented, t,y-augmented, prolonged) at one point, with
/// explicit field values.
pub fn cartan_ranks(beta: f64, germs: &[Jet<f64>]) -> Result<[usize; 4]> {
    let eqs = resolving_system(beta);
    let dirs = [VAR_T, VAR_Y, VAR_H];
    let first: Vec<(u8, MultiIndex)> = (0..4u8)
        .flat_map(|f| dirs.iter().map(move |&v| (f, MultiIndex::unit(v))))
        .collect();
    let second: Vec<(u8, MultiIndex)> = (0..4u8)
        .flat_map(|f| MultiIndex::all_up_to(2).iter().filter(|a| a.degree() == 2).map(move |&a| (f, a)))
        .collect();
    let slots = Slots::new();
    let ctx = EvalContext::new(germs, &slots);
    let base = jacobian(&eqs, &first, &ctx)?;
    let aug1 = stack(&base, &unit_rows(&first, VAR_T));
    let aug2 = stack(&aug1, &unit_rows(&first, VAR_Y));
    let prolonged: Vec<Expr> = eqs
        .iter()
        .flat_map(|e| dirs.iter().map(move |&v| e.total_derivative(v)))
        .collect();
    let pro = jacobian(&prolonged, &second, &ctx)?;
    Ok([
        numerical_rank(&base),
        numerical_rank(&aug1),
        numerical_rank(&aug2),
        numerical_rank(&pro),
    ])
}

impl CartanAudit {
    pub fn from_ranks(ranks: [usize; 4]) -> Self {
        let r = ranks.map(|v| v as i64);
        let taus = [12 - r[0], 12 - r[1], 12 - r[2]];
        let characters = [taus[0] - taus[1], taus[1] - taus[2]];
        let q = characters[0] + 2 * characters[1] + 3 * taus[2];
        let q1 = 24 - r[3];
        CartanAudit {
            ranks,
            taus,
            characters,
            cartan_numbers: [q, q1],
            pass: q == q1,
        }
    }
}

pub const CARTAN_RETRIES: usize = 100;

/// Cartan test at a random generic point; samples with |V| small are
/// rejected.
pub fn cartan_audit(beta: f64, seed: u64) -> Result<CartanAudit> {
    let mut s = Sampler::new(seed);
    for _ in 0..CARTAN_RETRIES {
        let p = s.point();
        let germs: Vec<Jet<f64>> = (0..4)
            .map(|_| Jet::from_fn(p, 2, |_| s.uniform(-1.0, 1.0)))
            .collect::<Result<_>>()?;
        if germs[V as usize].value().abs() < DENOM_FLOOR {
            continue;
        }
        return Ok(CartanAudit::from_ranks(cartan_ranks(beta, &germs)?));
    }
    Err(Error::DegenerateSample(CARTAN_RETRIES))
}
