//! Conservation laws: multipliers, densities, and laws generated by
//! symmetry characteristics.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::check::{Residual, Sampler, Summary, IDENTITY_TOL, TABLE2_TOL};
use crate::error::{Error, Result};
use crate::exprs::{EvalContext, Expr, Slots};
use crate::jet::{Jet, SmoothFn, Var};
use crate::model::{f_expr, zeta};
use crate::solutions::random_smooth;
use crate::symmetry::{characteristic, frechet_apply, Characteristic, Generator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LawId {
    J1,
    /// J1 exactly as printed, without the −τ₄′H_y flux term.
    J1Printed,
    J1Stationary,
    J2,
    J3,
    J4,
    J4a,
    J5_0,
    J6_0,
}

impl LawId {
    pub const ALL: [LawId; 9] = [
        LawId::J1,
        LawId::J1Printed,
        LawId::J1Stationary,
        LawId::J2,
        LawId::J3,
        LawId::J4,
        LawId::J4a,
        LawId::J5_0,
        LawId::J6_0,
    ];

    /// The laws of the catalog proper.
    pub const CATALOG: [LawId; 8] = [
        LawId::J1,
        LawId::J1Stationary,
        LawId::J2,
        LawId::J3,
        LawId::J4,
        LawId::J4a,
        LawId::J5_0,
        LawId::J6_0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LawId::J1 => "J1",
            LawId::J1Printed => "J1_printed",
            LawId::J1Stationary => "J1_stationary",
            LawId::J2 => "J2",
            LawId::J3 => "J3",
            LawId::J4 => "J4",
            LawId::J4a => "J4a",
            LawId::J5_0 => "J5_0",
            LawId::J6_0 => "J6_0",
        }
    }

    pub fn beta0_only(self) -> bool {
        matches!(self, LawId::J5_0 | LawId::J6_0)
    }

    pub fn slot_names(self) -> &'static [&'static str] {
        match self {
            LawId::J1 | LawId::J1Printed | LawId::J1Stationary => &["tau4"],
            LawId::J2 => &["tau3"],
            LawId::J4 => &["Phi"],
            LawId::J5_0 => &["tau2"],
            _ => &[],
        }
    }
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LawId::ALL
            .iter()
            .copied()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct ConservationLaw {
    pub id: LawId,
    pub beta: f64,
    pub multiplier: Expr,
    pub densities: [Expr; 3],
    pub order: usize,
}

struct Sym {
    h: Expr,
    ht: Expr,
    hx: Expr,
    hy: Expr,
    hxx: Expr,
    hxy: Expr,
    hyy: Expr,
    htx: Expr,
    hty: Expr,
    z: Expr,
    t: Expr,
    x: Expr,
    y: Expr,
}

impl Sym {
    fn new() -> Self {
        Sym {
            h: Expr::h(0, 0, 0),
            ht: Expr::h(1, 0, 0),
            hx: Expr::h(0, 1, 0),
            hy: Expr::h(0, 0, 1),
            hxx: Expr::h(0, 2, 0),
            hxy: Expr::h(0, 1, 1),
            hyy: Expr::h(0, 0, 2),
            htx: Expr::h(1, 1, 0),
            hty: Expr::h(1, 0, 1),
            z: zeta(),
            t: Expr::t(),
            x: Expr::x(),
            y: Expr::y(),
        }
    }
}

fn slot(name: &str) -> Expr {
    Expr::slot(name, Expr::t())
}

fn slot_d(name: &str, d: u8) -> Expr {
    Expr::slot_d(name, d, Expr::t())
}

/// Builds a law for the given β; β=0-only laws reject β ≠ 0.
pub fn law(id: LawId, beta: f64) -> Result<ConservationLaw> {
    if id.beta0_only() && beta != 0.0 {
        return Err(Error::RegimeMismatch(format!("{id} exists only for beta = 0")));
    }
    let Sym {
        h,
        ht,
        hx,
        hy,
        hxx,
        hxy,
        hyy,
        htx,
        hty,
        z,
        t,
        x,
        y,
    } = Sym::new();
    let b = beta;
    let r2 = (x.powi(2) + y.powi(2)) / 2.0;
    let (multiplier, densities) = match id {
        LawId::J1 | LawId::J1Printed => {
            let tau = slot("tau4");
            let mut qy = &z * &hx * &tau;
            if id == LawId::J1 {
                qy = qy - slot_d("tau4", 1) * &hy;
            }
            (tau.clone(), [&tau * &hyy, -((&z * &hy - &htx - b * &h) * &tau), qy])
        }
        LawId::J1Stationary => {
            let tau = slot("tau4");
            (
                tau.clone(),
                [
                    Expr::zero(),
                    (&htx + &hx * &hxy - &hy * &hxx + b * &h) * &tau,
                    (&hx * &hyy - &hy * &hxy + &hty) * &tau,
                ],
            )
        }
        LawId::J2 => {
            let tau = slot("tau3");
            (
                &y * &tau,
                [
                    &y * &tau * &hyy,
                    (hy.powi(2) + (&hx * &hxy - &hy * &hxx + &htx + b * &h) * &y) * &tau,
                    (&h - &y * &hy) * slot_d("tau3", 1) + ((&hx * &hyy - &hy * &hxy) * &y - &hx * &hy) * &tau,
                ],
            )
        }
        LawId::J3 => (
            -&h,
            [
                (hx.powi(2) + hy.powi(2)) / 2.0,
                (&z * &hy - &htx) * &h - b * h.powi(2) / 2.0,
                -((&hty + &z * &hx) * &h),
            ],
        ),
        LawId::J4 => {
            let arg = &z + b * &y;
            let phi = Expr::slot("Phi", arg.clone());
            (Expr::slot_d("Phi", 1, arg), [phi.clone(), -(&phi * &hy), &phi * &hx])
        }
        LawId::J4a => (
            z.clone(),
            [
                z.powi(2) / 2.0 + b * &t * &z * &hx,
                -(b * &t * (&ht * &hyy + &hx * &htx) + z.powi(2) * &hy / 2.0),
                z.powi(2) * &hx / 2.0 - b * &t * (&hx * &hty - &ht * &hxy),
            ],
        ),
        LawId::J5_0 => {
            let tau = slot("tau2");
            (
                &x * &tau,
                [
                    Expr::zero(),
                    ((&hx * &hxy - &hy * &hxx + &htx) * &x - &h * &hxy - &ht) * &tau,
                    ((&hx * &hyy - &hy * &hxy + &hty) * &x + &h * &hxx) * &tau,
                ],
            )
        }
        LawId::J6_0 => (
            r2.clone(),
            [
                &x * &hx + ((&hy * &hxy - &hx * &hyy) * &y + &h * &hxy) * &t + 3.0 * &h,
                &r2 * (&htx + &hx * &hxy - &hy * &hxx) - 2.0 * &y * (&t * &hy - &x) * &hty - &x * &h * &hxy
                    - &t * (&h * &hty + &ht * &hy),
                &r2 * (&hty + &hx * &hyy - &hy * &hxy) + ((&hx * &hty + &hy * &htx) * &t - 2.0 * &x * &htx - 3.0 * &ht) * &y
                    + &x * &h * &hxx,
            ],
        ),
    };
    let order = densities.iter().map(Expr::max_field_order).max().unwrap_or(0);
    Ok(ConservationLaw {
        id,
        beta,
        multiplier,
        densities,
        order,
    })
}

/// D_tQ^t + D_xQ^x + D_yQ^y.
pub fn divergence(q: &[Expr; 3]) -> Expr {
    Expr::sum([
        q[0].total_derivative(Var::T),
        q[1].total_derivative(Var::X),
        q[2].total_derivative(Var::Y),
    ])
}

impl ConservationLaw {
    /// D_tQ^t + D_xQ^x + D_yQ^y − ΛF as a single expression.
    pub fn identity_expr(&self) -> Expr {
        divergence(&self.densities) - &self.multiplier * f_expr(self.beta)
    }
}

fn need_order(h: &Jet<f64>, e: &Expr) -> Result<()> {
    let n = e.max_field_order();
    if h.order() < n {
        return Err(Error::OrderExceeded {
            needed: n,
            available: h.order(),
        });
    }
    Ok(())
}

fn check_slots(names: &[&str], slots: &Slots) -> Result<()> {
    for n in names {
        if !slots.contains_key(*n) {
            return Err(Error::MissingSlot(n.to_string()));
        }
    }
    Ok(())
}

pub fn eval_residual(e: &Expr, h: &Jet<f64>, slots: &Slots) -> Result<Residual> {
    need_order(h, e)?;
    let (v, scale) = e.eval_scaled(&EvalContext::new(std::slice::from_ref(h), slots))?;
    Ok(Residual::new(v.abs(), scale))
}

/// |D_tQ^t + D_xQ^x + D_yQ^y − ΛF| at the germ, on any germ.
pub fn divergence_residual(cl: &ConservationLaw, h: &Jet<f64>, slots: &Slots) -> Result<Residual> {
    check_slots(cl.id.slot_names(), slots)?;
    eval_residual(&cl.identity_expr(), h, slots)
}

pub fn random_slots(names: &[&str], s: &mut Sampler) -> Slots {
    names.iter().map(|n| (n.to_string(), random_smooth(s))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub law: String,
    pub regime: &'static str,
    #[serde(flatten)]
    pub summary: Summary,
}

/// Identity check over `draws` slot draws × `germs` random germs.
pub fn check_law(id: LawId, beta: f64, draws: usize, germs: usize, s: &mut Sampler) -> Result<LawReport> {
    let cl = law(id, beta)?;
    let e = cl.identity_expr();
    let mut summary = Summary::new(IDENTITY_TOL);
    for _ in 0..draws {
        let slots = random_slots(id.slot_names(), s);
        for _ in 0..germs {
            let j = s.jet(4);
            summary.push(eval_residual(&e, &j, &slots)?);
        }
    }
    Ok(LawReport {
        law: id.name().to_string(),
        regime: if id.beta0_only() { "beta=0" } else { "any" },
        summary,
    })
}

/// Divergence of densities(J4a) − densities(J2|τ₃=−β) − c·densities(J4|Φ=z²);
/// vanishes identically for c = ½.
pub fn j4a_decomposition_expr(beta: f64, c: f64) -> Result<(Expr, Slots)> {
    let a = law(LawId::J4a, beta)?;
    let b = law(LawId::J2, beta)?;
    let d = law(LawId::J4, beta)?;
    let q: Vec<Expr> = (0..3)
        .map(|i| &a.densities[i] - &b.densities[i] - c * &d.densities[i])
        .collect();
    let mut slots = Slots::new();
    slots.insert("tau3".into(), SmoothFn::constant(-beta));
    slots.insert("Phi".into(), SmoothFn::id().powi(2));
    Ok((divergence(&[q[0].clone(), q[1].clone(), q[2].clone()]), slots))
}

pub fn j4a_decomposition_check(h: &Jet<f64>, beta: f64, c: f64) -> Result<Residual> {
    let (e, slots) = j4a_decomposition_expr(beta, c)?;
    eval_residual(&e, h, &slots)
}

/// A law obtained by applying a characteristic to a base law.
#[derive(Clone, Debug)]
pub struct GeneratedLaw {
    pub base: LawId,
    pub generator: Generator,
    pub densities: [Expr; 3],
    pub rhs: Option<Expr>,
}

pub fn generate_law(base: &ConservationLaw, chi: &Characteristic) -> Result<GeneratedLaw> {
    chi.generator.check_regime(base.beta)?;
    let m = base.order;
    let d = |i: usize| frechet_apply(chi, &base.densities[i], m);
    let densities = [d(0)?, d(1)?, d(2)?];
    let rhs = table2()
        .into_iter()
        .find(|r| r.law == base.id && r.generator == chi.generator)
        .map(|r| r.rhs(base.beta));
    Ok(GeneratedLaw {
        base: base.id,
        generator: chi.generator,
        densities,
        rhs,
    })
}

/// One row of the table of third-order laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Table2Row {
    pub law: LawId,
    pub generator: Generator,
}

impl Table2Row {
    pub fn label(&self) -> String {
        format!("{}:{}", self.law, self.generator)
    }

    pub fn beta0(&self) -> bool {
        self.generator.beta0_only()
    }

    pub fn slot_names(&self) -> Vec<&'static str> {
        let mut v: Vec<&'static str> = self.law.slot_names().to_vec();
        v.extend_from_slice(self.generator.slot_names());
        v
    }

    /// The tabulated right-hand side.
    pub fn rhs(&self, beta: f64) -> Expr {
        let Sym { h, ht, hx, hy, z, t, x, y, .. } = Sym::new();
        let b = if self.beta0() { 0.0 } else { beta };
        let f = f_expr(b);
        let dt = f.total_derivative(Var::T);
        let dx = f.total_derivative(Var::X);
        let dy = f.total_derivative(Var::Y);
        let p3 = Expr::h(0, 3, 0) + Expr::h(0, 1, 2);
        let q3 = Expr::h(0, 2, 1) + Expr::h(0, 0, 3);
        let arg = &z + b * &y;
        let p1 = Expr::slot_d("Phi", 1, arg.clone());
        let p2 = Expr::slot_d("Phi", 2, arg);
        let (phi, psi, chi) = (slot("phi"), slot("psi"), slot("chi"));
        let (dphi, dpsi) = (slot_d("phi", 1), slot_d("psi", 1));
        let scale = &t * &dt - &x * &dx - &y * &dy;
        let rot = &x * &dy - &y * &dx;
        let trans = &phi * &dx + &psi * &dy;
        let r2 = x.powi(2) + y.powi(2);
        let t4p = slot_d("tau4", 1);
        let tau3 = slot("tau3");
        let tau2 = slot("tau2");
        use Generator as G;
        use LawId as L;
        match (self.law, self.generator) {
            (L::J1 | L::J1Printed, G::X3) => 2.0 * &t4p * &f + &t4p * &scale,
            (L::J2, G::X3) => 2.0 * &y * slot_d("tau3", 1) * &f + &y * slot_d("tau3", 1) * &scale,
            (L::J3, G::X3) => (&x * &hx + &y * &hy - &t * &ht - 5.0 * &h) * &f + &h * (&x * &dx + &y * &dy - &t * &dt),
            (L::J3, G::XInf) => (&y * slot_d("f", 1) + slot("f") * &h - slot("g")) * &f + slot("f") * &h * &dx,
            (L::J4, G::X1) => (&p3 * &hy - (b + &q3) * &hx) * &p2 * &f + &p2 * f.powi(2) + &p1 * &dt,
            (L::J4, G::X3) => {
                ((&t * (&p3 * &hy - (b + &q3) * &hx) - &y * &q3 - &x * &p3 + &z) * &p2 + 2.0 * &p1) * &f
                    + &t * &p2 * f.powi(2)
                    + &p1 * &scale
            }
            (L::J4, G::XInf) => &p3 * slot("f") * &p2 * &f + slot("f") * &p1 * &dx,
            (L::J1, G::X0_3) => &t4p * &rot,
            (L::J1, G::X0_5) => &t * &t4p * &rot,
            (L::J1, G::X0Inf) => &t4p * &trans,
            (L::J2, G::X0_3) => &y * &tau3 * &rot,
            (L::J2, G::X0_5) => &t * &y * &tau3 * &rot,
            (L::J2, G::X0Inf) => &y * &tau3 * &trans,
            (L::J3, G::X0_3) => (&x * &hy - &y * &hx) * &f + &h * &rot,
            (L::J3, G::X0_5) => (2.0 * &t * (&x * &hy - &y * &hx) - &r2) * &f + 2.0 * &t * &h * &rot,
            (L::J3, G::X0Inf) => {
                (&phi * &hx + &psi * &hy + &y * &dphi - &x * &dpsi - &chi) * &f + &h * &trans
            }
            (L::J4, G::X0_3) => (&q3 * &x - &p3 * &y) * &p2 * &f + &p1 * &rot,
            (L::J4, G::X0_5) => (2.0 - (&q3 * &x - &p3 * &y) * &t) * &p2 * &f - &t * &p1 * &rot,
            (L::J4, G::X0Inf) => (&q3 * &psi + &p3 * &phi) * &p2 * &f + &p1 * &trans,
            (L::J5_0, G::X0_2) => &x * &tau2 * (2.0 * &f + &t * &dt),
            (L::J5_0, G::X0_3) => &x * &tau2 * &rot,
            (L::J5_0, G::X0_4) => &x * &tau2 * (&x * &dx + &y * &dy),
            (L::J5_0, G::X0_5) => &t * &x * &tau2 * &rot,
            (L::J5_0, G::X0Inf) => &x * &tau2 * &trans,
            (L::J6_0, G::X0_2) => &r2 * (&f + &t * &dt),
            (L::J6_0, G::X0_3) => &r2 * &rot,
            (L::J6_0, G::X0_4) => &r2 * (&x * &dx + &y * &dy),
            (L::J6_0, G::X0_5) => &t * &r2 * &rot,
            (L::J6_0, G::X0Inf) => &r2 * &trans,
            _ => unreachable!("not a table row"),
        }
    }
}

/// All tabulated rows, with the J1 × X3 row also checked against J1 as printed.
pub fn table2() -> Vec<Table2Row> {
    use Generator as G;
    use LawId as L;
    let pairs = [
        (L::J1, G::X3),
        (L::J1Printed, G::X3),
        (L::J2, G::X3),
        (L::J3, G::X3),
        (L::J3, G::XInf),
        (L::J4, G::X1),
        (L::J4, G::X3),
        (L::J4, G::XInf),
        (L::J1, G::X0_3),
        (L::J1, G::X0_5),
        (L::J1, G::X0Inf),
        (L::J2, G::X0_3),
        (L::J2, G::X0_5),
        (L::J2, G::X0Inf),
        (L::J3, G::X0_3),
        (L::J3, G::X0_5),
        (L::J3, G::X0Inf),
        (L::J4, G::X0_3),
        (L::J4, G::X0_5),
        (L::J4, G::X0Inf),
        (L::J5_0, G::X0_2),
        (L::J5_0, G::X0_3),
        (L::J5_0, G::X0_4),
        (L::J5_0, G::X0_5),
        (L::J5_0, G::X0Inf),
        (L::J6_0, G::X0_2),
        (L::J6_0, G::X0_3),
        (L::J6_0, G::X0_4),
        (L::J6_0, G::X0_5),
        (L::J6_0, G::X0Inf),
    ];
    pairs
        .into_iter()
        .map(|(law, generator)| Table2Row { law, generator })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Verbatim,
    /// Holds only with the opposite overall sign of the tabulated rhs.
    SignFlipped,
    Mismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowReport {
    pub row: String,
    pub beta: f64,
    pub status: RowStatus,
    /// Worst normalized |div − rhs|.
    pub verbatim: f64,
    /// Worst normalized |div + rhs|.
    pub negated: f64,
    /// Worst normalized |div − X̂(Λ)F − ΛX̂(F)|.
    pub mechanical: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Divergence of the generated densities minus `sign`·rhs.
pub fn row_identity(row: &Table2Row, beta: f64, sign: f64) -> Result<Expr> {
    let b = if row.beta0() { 0.0 } else { beta };
    let base = law(row.law, b)?;
    let chi = characteristic(row.generator, &dummy_slots(row.generator))?;
    let g = generate_law(&base, &chi)?;
    Ok(divergence(&g.densities) - sign * row.rhs(b))
}

/// X̂ commutes with total derivatives, so div X̂Q = X̂(Λ)F + ΛX̂(F)
/// whenever div Q = ΛF.
pub fn mechanical_rhs(base: &ConservationLaw, chi: &Characteristic) -> Result<Expr> {
    let f = f_expr(base.beta);
    let xl = frechet_apply(chi, &base.multiplier, base.multiplier.max_field_order())?;
    let xf = frechet_apply(chi, &f, 3)?;
    Ok(xl * &f + &base.multiplier * xf)
}

fn mechanical_identity(row: &Table2Row, beta: f64) -> Result<Expr> {
    let b = if row.beta0() { 0.0 } else { beta };
    let base = law(row.law, b)?;
    let chi = characteristic(row.generator, &dummy_slots(row.generator))?;
    let g = generate_law(&base, &chi)?;
    Ok(divergence(&g.densities) - mechanical_rhs(&base, &chi)?)
}

/// Densities generated from `base` by `generator`, and the identity
/// div X̂Q − X̂(Λ)F − ΛX̂(F). Generator slots stay symbolic.
pub fn generated_identity(base: &ConservationLaw, generator: Generator) -> Result<([Expr; 3], Expr)> {
    let chi = characteristic(generator, &dummy_slots(generator))?;
    let g = generate_law(base, &chi)?;
    let id = divergence(&g.densities) - mechanical_rhs(base, &chi)?;
    Ok((g.densities, id))
}

fn dummy_slots(g: Generator) -> Slots {
    g.slot_names()
        .iter()
        .map(|n| (n.to_string(), SmoothFn::constant(0.0)))
        .collect()
}

pub fn check_row(row: &Table2Row, beta: f64, germs: usize, s: &mut Sampler) -> Result<RowReport> {
    let b = if row.beta0() { 0.0 } else { beta };
    let plus = row_identity(row, b, 1.0)?;
    let minus = row_identity(row, b, -1.0)?;
    let mech = mechanical_identity(row, b)?;
    let mut sp = Summary::new(TABLE2_TOL);
    let mut sm = Summary::new(TABLE2_TOL);
    let mut sx = Summary::new(TABLE2_TOL);
    for _ in 0..germs {
        let slots = random_slots(&row.slot_names(), s);
        let j = s.jet(5);
        sp.push(eval_residual(&plus, &j, &slots)?);
        sm.push(eval_residual(&minus, &j, &slots)?);
        sx.push(eval_residual(&mech, &j, &slots)?);
    }
    let status = if sp.pass {
        RowStatus::Verbatim
    } else if sm.pass {
        RowStatus::SignFlipped
    } else {
        RowStatus::Mismatch
    };
    Ok(RowReport {
        row: row.label(),
        beta: b,
        status,
        verbatim: sp.max_normalized,
        negated: sm.max_normalized,
        mechanical: sx.max_normalized,
        samples: germs,
        pass: sp.pass,
    })
}

/// The two third-order laws printed in full: (name, densities, rhs, slots).
pub fn printed_laws(beta: f64) -> Vec<(&'static str, [Expr; 3], Expr, Vec<&'static str>)> {
    let Sym {
        h,
        ht,
        hx,
        hy,
        hxx,
        hxy,
        hyy,
        htx,
        hty,
        z,
        t,
        x,
        y,
    } = Sym::new();
    let b = beta;
    let f = f_expr(b);
    let d = Expr::h;
    let dx = f.total_derivative(Var::X);
    let dy = f.total_derivative(Var::Y);
    let dt = f.total_derivative(Var::T);

    let e3 = &t * &ht - &x * &hx - &y * &hy + 3.0 * &h;
    let ex = &t * &htx - &x * &hxx - &y * &hxy + 2.0 * &hx;
    let ey = &t * &hty - &x * &hxy - &y * &hyy + 2.0 * &hy;
    let exx = &t * d(1, 2, 0) - &x * d(0, 3, 0) - &y * d(0, 2, 1) + &hxx;
    let eyy = &t * d(1, 0, 2) - &x * d(0, 1, 2) - &y * d(0, 0, 3) + &hyy;
    let etx = &t * d(2, 1, 0) - &x * d(1, 2, 0) - &y * d(1, 1, 1) + 3.0 * &htx;
    let ety = &t * d(2, 0, 1) - &x * d(1, 1, 1) - &y * d(1, 0, 2) + 3.0 * &hty;
    let qt = &ex * &hx + &ey * &hy;
    let qx = &e3 * (&z * &hy - b * &h - &htx) + &ey * &h * &z + &exx * &h * &hy + &eyy * &h * &hy - &etx * &h;
    let qy = -(&e3 * (&z * &hx + &hty) + &ex * &h * &z + &exx * &h * &hx + &eyy * &h * &hx + &ety * &h);
    let rhs3 = (&x * &hx + &y * &hy - &t * &ht - 5.0 * &h) * &f + &h * (&x * &dx + &y * &dy - &t * &dt);

    let (ff, fp, fpp, g) = (slot("f"), slot_d("f", 1), slot_d("f", 2), slot("g"));
    let eta = &g - &y * &fp - &ff * &hx;
    let zx = z.total_derivative(Var::X);
    let pt = -(&ff * &hxx * &hx) - (&fp + &ff * &hxy) * &hy;
    let px = &eta * (&z * &hy - b * &h - &htx) - (&fp + &ff * &hxy) * &h * &z - &ff * &h * &hy * &zx
        + (&fp * &hxx + &ff * d(1, 2, 0)) * &h;
    let py = &ff * &h * (&z * &hx).total_derivative(Var::X) - &eta * (&z * &hx + &hty)
        + (&fpp + &fp * &hxy + &ff * d(1, 1, 1)) * &h;
    let rhsinf = (&y * &fp + &ff * &h - &g) * &f + &ff * &h * &dx;

    vec![
        ("J3:X3", [qt, qx, qy], rhs3, vec![]),
        ("J3:Xinf", [pt, px, py], rhsinf, vec!["f", "g"]),
    ]
}
