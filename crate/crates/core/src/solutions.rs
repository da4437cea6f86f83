//! Catalog of closed-form invariant solutions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::check::{Sampler, Summary, IDENTITY_TOL};
use crate::error::{Error, Result};
use crate::exprs::{EvalContext, Expr, Slots};
use crate::jet::{Jet, Scalar, SmoothFn};
use crate::model::residual_f_scaled;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SolutionId {
    Gaurvitz,
    A3,
    A21_1,
    A21_2,
    A22_1,
    A22_2,
    A23_1a,
    A23_2,
    A11_1,
    A11_2,
    A11_3,
    A12_1,
    A13_1,
    A14_1,
    A14_2,
    A14_3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl SolutionId {
    pub const ALL: [SolutionId; 16] = [
        SolutionId::Gaurvitz,
        SolutionId::A3,
        SolutionId::A21_1,
        SolutionId::A21_2,
        SolutionId::A22_1,
        SolutionId::A22_2,
        SolutionId::A23_1a,
        SolutionId::A23_2,
        SolutionId::A11_1,
        SolutionId::A11_2,
        SolutionId::A11_3,
        SolutionId::A12_1,
        SolutionId::A13_1,
        SolutionId::A14_1,
        SolutionId::A14_2,
        SolutionId::A14_3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolutionId::Gaurvitz => "gaurvitz",
            SolutionId::A3 => "a3",
            SolutionId::A21_1 => "a21_1",
            SolutionId::A21_2 => "a21_2",
            SolutionId::A22_1 => "a22_1",
            SolutionId::A22_2 => "a22_2",
            SolutionId::A23_1a => "a23_1a",
            SolutionId::A23_2 => "a23_2",
            SolutionId::A11_1 => "a11_1",
            SolutionId::A11_2 => "a11_2",
            SolutionId::A11_3 => "a11_3",
            SolutionId::A12_1 => "a12_1",
            SolutionId::A13_1 => "a13_1",
            SolutionId::A14_1 => "a14_1",
            SolutionId::A14_2 => "a14_2",
            SolutionId::A14_3 => "a14_3",
        }
    }

    pub fn field(self) -> Field {
        if self == SolutionId::A13_1 {
            Field::Complex
        } else {
            Field::Real
        }
    }

    /// Parameter names, slot names and constraint descriptions.
    pub fn info(self) -> (&'static [&'static str], &'static [&'static str], &'static [&'static str]) {
        use SolutionId::*;
        match self {
            Gaurvitz => (
                &["rho", "kappa", "nu", "mu", "lambda"],
                &[],
                &["(kappa^2+nu^2)(lambda+mu) = -beta", "kappa^2+nu^2 > 0", "lambda derived when omitted"],
            ),
            A3 => (&["z0"], &["tau1", "tau2"], &[]),
            A21_1 => (&["A"], &["tau"], &[]),
            A21_2 => (
                &["C1", "C2", "C3", "C4", "A1", "A2", "A3"],
                &["tau"],
                &[
                    "C1 > 0, C2 != 0",
                    "A1^2 C1 = 1",
                    "A3^2 C1 C2^2 = 1",
                    "A1 A3 C1 C2 = 1",
                    "A2 = C3/2",
                    "zeta = C1 C2^2 y + (C1 C4 - t) C2 - 1 > 0",
                ],
            ),
            A22_1 => (&["w0"], &["tau"], &[]),
            A22_2 => (
                &["C1"],
                &["tau1"],
                &["C1 != 0", "tau2 = (tau1'' + tau1^2/2)/C1"],
            ),
            A23_1a => (&["C1"], &["tau2"], &["t > 0"]),
            A23_2 => (
                &["C1", "C2", "C3", "C4"],
                &["tau"],
                &[
                    "C1 not in {-2, -3/2, -1, 0}",
                    "(C1+1)(C1 y + C4) t + C1 C2 > 0 at sample points",
                    "t != 0",
                ],
            ),
            A11_1 => (&["A", "B"], &["tau"], &[]),
            A11_2 => (&["C1", "C2"], &["tau"], &["y != -C1", "t != 0"]),
            A11_3 => (
                &["C1", "C3", "C4", "C5", "A1", "A2", "B1", "B2"],
                &["tau"],
                &["C1 != 0", "2 C1 A1 = -1", "2 C1 A2 = C3", "C1^3 B1 = C4", "C1^3 B2 = -C5"],
            ),
            A12_1 => (&["C1", "C2", "C3"], &["tau"], &["1 + C1 exp(-t) != 0"]),
            A13_1 => (&["A"], &["tau"], &["A > 0", "complex field"]),
            A14_1 => (&["alpha", "A1", "A2", "A3"], &["tau1"], &["alpha = +-1", "A3 != 0"]),
            A14_2 => (&["alpha", "C1", "C2"], &["tau2"], &["alpha = +-1", "C1 != alpha"]),
            A14_3 => (&["alpha", "C1", "C2"], &["tau"], &["alpha = +-1", "t > 0"]),
        }
    }

    /// Parameters filled in from the others when omitted.
    pub fn derived_params(self) -> &'static [&'static str] {
        match self {
            SolutionId::Gaurvitz => &["lambda"],
            SolutionId::A21_2 => &["A1", "A2", "A3"],
            SolutionId::A11_3 => &["A1", "A2", "B1", "B2"],
            _ => &[],
        }
    }
}

impl fmt::Display for SolutionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolutionId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SolutionId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// Catalog entry for listing.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub params: Vec<&'static str>,
    pub slots: Vec<&'static str>,
    pub constraints: Vec<&'static str>,
    pub beta_regime: &'static str,
    pub field: Field,
}

pub fn catalog() -> Vec<CatalogEntry> {
    SolutionId::ALL
        .iter()
        .map(|&id| {
            let (p, s, c) = id.info();
            CatalogEntry {
                id: id.name(),
                params: p.to_vec(),
                slots: s.to_vec(),
                constraints: c.to_vec(),
                beta_regime: "any",
                field: id.field(),
            }
        })
        .collect()
}

/// A catalog solution with concrete parameters and slot functions.
#[derive(Clone, Debug)]
pub struct SolutionSpec {
    pub id: SolutionId,
    pub beta: f64,
    pub params: BTreeMap<String, f64>,
    pub slots: Slots,
}

const CONSTRAINT_TOL: f64 = 1e-12;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONSTRAINT_TOL * (1.0 + a.abs().max(b.abs()))
}

impl SolutionSpec {
    /// Builds a spec, filling derived parameters, and checks constraints.
    pub fn new(id: SolutionId, beta: f64, params: BTreeMap<String, f64>, slots: Slots) -> Result<Self> {
        let mut s = SolutionSpec {
            id,
            beta,
            params,
            slots,
        };
        s.derive_params()?;
        s.check_constraints()?;
        Ok(s)
    }

    pub fn field(&self) -> Field {
        self.id.field()
    }

    fn p(&self, name: &str) -> Result<f64> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("{}: missing parameter `{name}`", self.id)))
    }

    fn derive_params(&mut self) -> Result<()> {
        let fill = |params: &mut BTreeMap<String, f64>, k: &str, v: f64| {
            params.entry(k.to_string()).or_insert(v);
        };
        match self.id {
            SolutionId::Gaurvitz => {
                let (k, n, mu) = (self.p("kappa")?, self.p("nu")?, self.p("mu")?);
                let k2 = k * k + n * n;
                if k2 > 0.0 {
                    fill(&mut self.params, "lambda", -self.beta / k2 - mu);
                }
            }
            SolutionId::A21_2 => {
                let (c1, c2, c3) = (self.p("C1")?, self.p("C2")?, self.p("C3")?);
                if c1 > 0.0 && c2 != 0.0 {
                    fill(&mut self.params, "A1", 1.0 / c1.sqrt());
                    fill(&mut self.params, "A3", 1.0 / (c1.sqrt() * c2));
                }
                fill(&mut self.params, "A2", c3 / 2.0);
            }
            SolutionId::A11_3 => {
                let c1 = self.p("C1")?;
                if c1 != 0.0 {
                    let (c3, c4, c5) = (self.p("C3")?, self.p("C4")?, self.p("C5")?);
                    fill(&mut self.params, "A1", -1.0 / (2.0 * c1));
                    fill(&mut self.params, "A2", c3 / (2.0 * c1));
                    fill(&mut self.params, "B1", c4 / c1.powi(3));
                    fill(&mut self.params, "B2", -c5 / c1.powi(3));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn check_constraints(&self) -> Result<()> {
        let (names, slot_names, _) = self.id.info();
        for n in names {
            self.p(n)?;
        }
        for s in slot_names {
            if !self.slots.contains_key(*s) {
                return Err(Error::MissingSlot(s.to_string()));
            }
        }
        let fail = |msg: String| Err(Error::ConstraintViolated(format!("{}: {msg}", self.id)));
        let alpha_ok = |a: f64| a == 1.0 || a == -1.0;
        match self.id {
            SolutionId::Gaurvitz => {
                let (k, n, mu, l) = (self.p("kappa")?, self.p("nu")?, self.p("mu")?, self.p("lambda")?);
                let k2 = k * k + n * n;
                if k2 <= 0.0 {
                    return fail("kappa^2+nu^2 > 0".into());
                }
                if !close(k2 * (l + mu), -self.beta) {
                    return fail(format!("(kappa^2+nu^2)(lambda+mu) = {} != -beta = {}", k2 * (l + mu), -self.beta));
                }
            }
            SolutionId::A21_2 => {
                let (c1, c2) = (self.p("C1")?, self.p("C2")?);
                let (a1, a2, a3) = (self.p("A1")?, self.p("A2")?, self.p("A3")?);
                if !(c1 > 0.0) || c2 == 0.0 {
                    return fail("C1 > 0, C2 != 0".into());
                }
                if !close(a1 * a1 * c1, 1.0) {
                    return fail("A1^2 C1 = 1".into());
                }
                if !close(a3 * a3 * c1 * c2 * c2, 1.0) {
                    return fail("A3^2 C1 C2^2 = 1".into());
                }
                if !close(a1 * a3 * c1 * c2, 1.0) {
                    return fail("A1 A3 C1 C2 = 1".into());
                }
                if !close(a2, self.p("C3")? / 2.0) {
                    return fail("A2 = C3/2".into());
                }
            }
            SolutionId::A22_2 => {
                if self.p("C1")? == 0.0 {
                    return fail("C1 != 0".into());
                }
            }
            SolutionId::A23_2 => {
                let c1 = self.p("C1")?;
                if [-2.0, -1.5, -1.0, 0.0].contains(&c1) {
                    return fail("C1 not in {-2, -3/2, -1, 0}".into());
                }
            }
            SolutionId::A11_3 => {
                let c1 = self.p("C1")?;
                if c1 == 0.0 {
                    return fail("C1 != 0".into());
                }
                let checks = [
                    (2.0 * c1 * self.p("A1")?, -1.0, "2 C1 A1 = -1"),
                    (2.0 * c1 * self.p("A2")?, self.p("C3")?, "2 C1 A2 = C3"),
                    (c1.powi(3) * self.p("B1")?, self.p("C4")?, "C1^3 B1 = C4"),
                    (c1.powi(3) * self.p("B2")?, -self.p("C5")?, "C1^3 B2 = -C5"),
                ];
                for (a, b, msg) in checks {
                    if !close(a, b) {
                        return fail(msg.into());
                    }
                }
            }
            SolutionId::A13_1 => {
                if !(self.p("A")? > 0.0) {
                    return fail("A > 0".into());
                }
            }
            SolutionId::A14_1 | SolutionId::A14_2 | SolutionId::A14_3 => {
                let a = self.p("alpha")?;
                if !alpha_ok(a) {
                    return fail("alpha = +-1".into());
                }
                if self.id == SolutionId::A14_1 && self.p("A3")? == 0.0 {
                    return fail("A3 != 0".into());
                }
                if self.id == SolutionId::A14_2 && self.p("C1")? == a {
                    return fail("C1 != alpha".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The solution H(t, x, y) as an expression.
    pub fn expr(&self) -> Result<Expr> {
        let (t, x, y) = (Expr::t(), Expr::x(), Expr::y());
        let s = |n: &str| Expr::slot(n, Expr::t());
        let sd = |n: &str, d: u8| Expr::slot_d(n, d, Expr::t());
        let b = self.beta;
        let p = |n: &str| self.p(n);
        let y3 = y.powi(3) * (-b / 6.0);
        Ok(match self.id {
            SolutionId::Gaurvitz => {
                let (rho, k, n, mu, l) = (p("rho")?, p("kappa")?, p("nu")?, p("mu")?, p("lambda")?);
                rho * (k * (&x - l * &t) + n * &y).cos() + mu * &y
            }
            SolutionId::A3 => p("z0")? / 2.0 * y.powi(2) + s("tau1") * &y + s("tau2"),
            SolutionId::A21_1 => p("A")? * (y.powi(2) + 2.0 * &x) * (-b * &t).exp() + s("tau") * &y,
            SolutionId::A21_2 => {
                let (c1, c2, c4) = (p("C1")?, p("C2")?, p("C4")?);
                let (a1, a2, a3) = (p("A1")?, p("A2")?, p("A3")?);
                let z = c1 * c2 * c2 * &y + (c1 * c4 - &t) * c2 - 1.0;
                let a3_2 = a3 * a3;
                let a3_4 = a3_2 * a3_2;
                let a3_6 = a3_4 * a3_2;
                (a3_6 / 4.0 * z.powi(2) + a3_4 * &y * &z - a3_2 / 2.0 * y.powi(2) * (&z + 2.0) + y.powi(3) / 3.0) * b
                    - 0.5 * a3_6 * b * z.powi(2) * z.ln()
                    + a1 * a3 * &x * (&z + 1.0)
                    + a2 * y.powi(2)
                    + &y * s("tau")
            }
            SolutionId::A22_1 => {
                let w2 = p("w0")?.powi(2);
                w2 / 2.0 * (y.powi(2) - x.powi(2)) * s("tau") + w2 / 6.0 * (3.0 * y.powi(2) - x.powi(2)) * &x
                    - w2 / 2.0 * &x * s("tau").powi(2)
                    + y3
                    + &y * sd("tau", 1)
            }
            SolutionId::A22_2 => {
                let c1 = p("C1")?;
                let tau2 = (sd("tau1", 2) + s("tau1").powi(2) / 2.0) / c1;
                s("tau1") * &x * &y + c1 / 2.0 * x.powi(2) * &y - (b + c1) / 6.0 * y.powi(3) + &y * tau2
            }
            SolutionId::A23_1a => &x / &t + 0.5 * (p("C1")? - b * t.ln()) * y.powi(2) + &y * s("tau2"),
            SolutionId::A23_2 => {
                let (c1, c2, c3, c4) = (p("C1")?, p("C2")?, p("C3")?, p("C4")?);
                let e = (2.0 * c1 + 3.0) / (c1 + 1.0);
                let base = (c1 + 1.0) * (c1 * &y + c4) * &t + c1 * c2;
                ((c1 * &y + c4) / &t + c2 / t.powi(2)) * &x - b * (y.powi(3) / 6.0 + c4 * y.powi(2) / (2.0 * c1))
                    + c3 * base.powf(e) / (t.powi(3) * (c1 * c1 * (c1 + 2.0) * (2.0 * c1 + 3.0)))
                    + &y * s("tau")
            }
            SolutionId::A11_1 => p("A")? * &x + y3 + p("B")? * y.powi(2) + s("tau") * &y,
            SolutionId::A11_2 => {
                let (c1, c2) = (p("C1")?, p("C2")?);
                let yc = &y + c1;
                let ln_abs = |e: Expr| 0.5 * e.powi(2).ln();
                c2 * y.powi(2) * ln_abs(&yc / &t) + c1 * c2 * (2.0 * &y + c1) * ln_abs(yc.clone()) + y3
                    + &x / &t * &yc
                    - c2 / 2.0 * (3.0 * &y + c1).powi(2)
                    + 3.0 * c2 * y.powi(2)
                    + s("tau") * &y
            }
            SolutionId::A11_3 => {
                let c1 = p("C1")?;
                let xt = &x + s("tau");
                p("A1")? * (c1 * &xt).exp() + p("A2")? * (-c1 * &xt).exp() + p("B1")? * (c1 * &y).exp()
                    + p("B2")? * (-c1 * &y).exp()
                    + (sd("tau", 1) + b / (c1 * c1)) * &y
            }
            SolutionId::A12_1 => {
                let (c1, c2, c3) = (p("C1")?, p("C2")?, p("C3")?);
                let em = (-&t).exp();
                let sigma = Expr::one() / (1.0 + c1 * &em);
                ((&y + c2 * (c1 * &em - &t) + c3) * &x
                    - b / 6.0 * y.powi(3)
                    - b / 2.0 * (c2 * (c1 * &t * &em - 1.0) + c3) * y.powi(2))
                    * sigma
                    + s("tau") * &y
            }
            SolutionId::A13_1 => {
                let ln_a = p("A")?.ln();
                let phase = &t * (&x + Expr::i() * &y + s("tau"));
                t.powi(-3) * (-ln_a * &t).exp() * phase.exp() + y3 + sd("tau", 1) * &y
            }
            SolutionId::A14_1 => {
                let (al, a1, a2, a3) = (p("alpha")?, p("A1")?, p("A2")?, p("A3")?);
                let lam = &y - al * &t;
                let xt = &x + s("tau1");
                a1 * (a3 * &xt).exp() + a2 * (-a3 * &xt).exp() + (sd("tau1", 1) + b / (a3 * a3)) * lam
            }
            SolutionId::A14_2 => {
                let (al, c1, c2) = (p("alpha")?, p("C1")?, p("C2")?);
                let lam = &y - al * &t;
                c1 * &x - c1 * b / (6.0 * (c1 - al)) * lam.powi(3) + c2 * lam.powi(2) + s("tau2") * lam
            }
            SolutionId::A14_3 => {
                let (al, c1, c2) = (p("alpha")?, p("C1")?, p("C2")?);
                let lam = &y - al * &t;
                (&x / &t + s("tau")) * &lam
                    + (b * (c1 - al * &t) - al * c2 * t.ln() - c1 * c2 / &t) * lam.powi(2) / 2.0
                    - (b + c2 / &t) * lam.powi(3) / 6.0
                    + c1 * &x / &t
            }
        })
    }

    /// Jet of H at `point`.
    pub fn germ<S: Scalar>(&self, point: [f64; 3], order: usize) -> Result<Jet<S>> {
        if self.field() == Field::Complex && !S::IS_COMPLEX {
            return Err(Error::Invalid(format!("{} needs the complex field", self.id)));
        }
        self.expr()?.evaluate(&EvalContext::at(point, &self.slots), order)
    }

    /// Random admissible parameters and slot functions.
    pub fn random(id: SolutionId, beta: f64, s: &mut Sampler) -> Self {
        let mut params = BTreeMap::new();
        let mut put = |k: &str, v: f64| {
            params.insert(k.to_string(), v);
        };
        let mag = |s: &mut Sampler| s.sign() * s.uniform(0.5, 1.5);
        match id {
            SolutionId::Gaurvitz => {
                put("rho", mag(s));
                put("kappa", mag(s));
                put("nu", s.uniform(-1.5, 1.5));
                put("mu", s.uniform(-1.0, 1.0));
            }
            SolutionId::A3 => put("z0", s.uniform(-2.0, 2.0)),
            SolutionId::A21_1 | SolutionId::A13_1 => put("A", s.uniform(0.5, 2.0)),
            SolutionId::A21_2 => {
                let c1 = s.uniform(0.5, 1.5);
                let c2 = s.sign() * s.uniform(0.5, 1.0);
                put("C1", c1);
                put("C2", c2);
                put("C3", s.uniform(-1.0, 1.0));
                put("C4", (3.0 / c2 + 1.0) / c1);
                let sg = s.sign();
                put("A1", sg / c1.sqrt());
                put("A3", sg / (c1.sqrt() * c2));
            }
            SolutionId::A22_1 => put("w0", mag(s)),
            SolutionId::A22_2 => put("C1", mag(s)),
            SolutionId::A23_1a => put("C1", s.uniform(-1.0, 1.0)),
            SolutionId::A23_2 => {
                put("C1", s.uniform(0.5, 1.5));
                put("C2", s.uniform(0.5, 1.0));
                put("C3", mag(s));
                put("C4", 2.0);
            }
            SolutionId::A11_1 => {
                put("A", s.uniform(-1.0, 1.0));
                put("B", s.uniform(-1.0, 1.0));
            }
            SolutionId::A11_2 => {
                put("C1", s.sign() * s.uniform(1.5, 2.5));
                put("C2", mag(s));
            }
            SolutionId::A11_3 => {
                put("C1", mag(s));
                put("C3", s.uniform(-1.0, 1.0));
                put("C4", s.uniform(-1.0, 1.0));
                put("C5", s.uniform(-1.0, 1.0));
            }
            SolutionId::A12_1 => {
                put("C1", s.uniform(0.2, 2.0));
                put("C2", s.uniform(-1.0, 1.0));
                put("C3", s.uniform(-1.0, 1.0));
            }
            SolutionId::A14_1 => {
                put("alpha", s.sign());
                put("A1", s.uniform(-1.0, 1.0));
                put("A2", s.uniform(-1.0, 1.0));
                put("A3", mag(s));
            }
            SolutionId::A14_2 => {
                let al = s.sign();
                put("alpha", al);
                put("C1", -al * s.uniform(0.5, 1.5));
                put("C2", s.uniform(-1.0, 1.0));
            }
            SolutionId::A14_3 => {
                put("alpha", s.sign());
                put("C1", s.uniform(-1.0, 1.0));
                put("C2", s.uniform(-1.0, 1.0));
            }
        }
        let mut slots = Slots::new();
        for name in id.info().1 {
            slots.insert(name.to_string(), random_smooth(s));
        }
        SolutionSpec::new(id, beta, params, slots).expect("random draws satisfy the constraints")
    }
}

/// A random smooth function from a small family with O(1) coefficients.
pub fn random_smooth(s: &mut Sampler) -> SmoothFn {
    let a = s.uniform(-1.0, 1.0);
    let b = s.uniform(-1.0, 1.0);
    let c = s.uniform(-1.0, 1.0);
    let id = SmoothFn::id;
    match s.below(5) {
        0 => id() * a + b,
        1 => (id() * b).sin() * a + c,
        2 => (id() * b).exp() * a,
        3 => id().powi(2) * a + id() * b + c,
        _ => id().cos() * a + (id() * c).exp() * b,
    }
}

/// Report of a residual verification run.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub id: String,
    pub beta: f64,
    pub points: usize,
    pub rejected_points: usize,
    #[serde(flatten)]
    pub summary: Summary,
}

/// Time window and box used for sample points.
pub const SAMPLE_BOX: [(f64, f64); 3] = [(0.5, 1.5), (-1.0, 1.0), (-1.0, 1.0)];

pub fn sample_point(s: &mut Sampler) -> [f64; 3] {
    [
        s.uniform(SAMPLE_BOX[0].0, SAMPLE_BOX[0].1),
        s.uniform(SAMPLE_BOX[1].0, SAMPLE_BOX[1].1),
        s.uniform(SAMPLE_BOX[2].0, SAMPLE_BOX[2].1),
    ]
}

/// Max |F| over random in-domain points; points outside the solution's
/// domain are rejected and redrawn.
pub fn verify_expr<S: Scalar>(h: &Expr, beta: f64, slots: &Slots, points: usize, s: &mut Sampler) -> Result<(Summary, usize)> {
    let mut summary = Summary::new(IDENTITY_TOL);
    let mut rejected = 0;
    let mut n = 0;
    while n < points {
        let p = sample_point(s);
        let germ: Jet<S> = match h.evaluate(&EvalContext::at(p, slots), 3) {
            Ok(g) => g,
            Err(Error::Domain(_)) => {
                rejected += 1;
                if rejected > 100 * points.max(1) {
                    return Err(Error::domain("no admissible sample points"));
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        summary.push(residual_f_scaled(&germ, beta)?);
        n += 1;
    }
    Ok((summary, rejected))
}

pub fn verify(spec: &SolutionSpec, points: usize, seed: u64) -> Result<VerifyReport> {
    let mut s = Sampler::new(seed);
    let h = spec.expr()?;
    let (summary, rejected) = match spec.field() {
        Field::Real => verify_expr::<f64>(&h, spec.beta, &spec.slots, points, &mut s)?,
        Field::Complex => verify_expr::<Complex64>(&h, spec.beta, &spec.slots, points, &mut s)?,
    };
    Ok(VerifyReport {
        id: spec.id.name().to_string(),
        beta: spec.beta,
        points,
        rejected_points: rejected,
        summary,
    })
}

/// Full catalog sweep: `draws` random parameter/slot draws per id, each
/// checked at `points` points.
pub fn verify_catalog(beta: f64, draws: usize, points: usize, seed: u64) -> Result<Vec<VerifyReport>> {
    let mut s = Sampler::new(seed);
    let mut out = Vec::new();
    for id in SolutionId::ALL {
        let mut agg: Option<VerifyReport> = None;
        for _ in 0..draws {
            let spec = SolutionSpec::random(id, beta, &mut s);
            let sub_seed = s.below(usize::MAX / 2) as u64;
            let r = verify(&spec, points, sub_seed)?;
            agg = Some(match agg {
                None => r,
                Some(mut a) => {
                    a.points += r.points;
                    a.rejected_points += r.rejected_points;
                    a.summary.merge(&r.summary);
                    a
                }
            });
        }
        if let Some(a) = agg {
            out.push(a);
        }
    }
    Ok(out)
}

/// Sum of several solutions of the same β, with slots renamed apart.
pub fn superpose(specs: &[SolutionSpec]) -> Result<(Expr, Slots)> {
    let mut slots = Slots::new();
    let mut terms = Vec::new();
    for (k, sp) in specs.iter().enumerate() {
        let mut rename = BTreeMap::new();
        for (name, f) in &sp.slots {
            let new = format!("{name}#{k}");
            rename.insert(name.clone(), new.clone());
            slots.insert(new, f.clone());
        }
        terms.push(sp.expr()?.rename_slots(&rename));
    }
    Ok((Expr::sum(terms), slots))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn slots(kv: &[(&str, SmoothFn)]) -> Slots {
        kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn a3_value() {
        let sp = SolutionSpec::new(
            SolutionId::A3,
            1.0,
            params(&[("z0", 2.0)]),
            slots(&[("tau1", SmoothFn::id()), ("tau2", SmoothFn::constant(0.0))]),
        )
        .unwrap();
        let g: Jet<f64> = sp.germ([1.0, 0.0, 3.0], 0).unwrap();
        assert_eq!(g.value(), 12.0);
    }

    #[test]
    fn a23_1a_value() {
        let sp = SolutionSpec::new(
            SolutionId::A23_1a,
            1.0,
            params(&[("C1", 1.0)]),
            slots(&[("tau2", SmoothFn::constant(0.0))]),
        )
        .unwrap();
        let g: Jet<f64> = sp.germ([1.0, 2.0, 0.0], 0).unwrap();
        assert_eq!(g.value(), 2.0);
    }

    #[test]
    fn gaurvitz_lambda_derived() {
        let sp = SolutionSpec::new(
            SolutionId::Gaurvitz,
            1.0,
            params(&[("rho", 1.0), ("kappa", 1.0), ("nu", 0.0), ("mu", 0.0)]),
            Slots::new(),
        )
        .unwrap();
        assert_eq!(sp.params["lambda"], -1.0);
        let bad = SolutionSpec::new(
            SolutionId::Gaurvitz,
            1.0,
            params(&[("rho", 1.0), ("kappa", 1.0), ("nu", 0.0), ("mu", 0.0), ("lambda", -0.9)]),
            Slots::new(),
        );
        assert!(matches!(bad, Err(Error::ConstraintViolated(_))));
    }

    #[test]
    fn domain_is_enforced() {
        let sp = SolutionSpec::new(
            SolutionId::A23_1a,
            1.0,
            params(&[("C1", 1.0)]),
            slots(&[("tau2", SmoothFn::constant(0.0))]),
        )
        .unwrap();
        assert!(matches!(sp.germ::<f64>([-1.0, 0.0, 0.0], 2), Err(Error::Domain(_))));
    }

    #[test]
    fn complex_only() {
        let mut s = Sampler::new(1);
        let sp = SolutionSpec::random(SolutionId::A13_1, 1.0, &mut s);
        assert!(sp.germ::<f64>([1.0, 0.0, 0.0], 2).is_err());
        assert!(sp.germ::<Complex64>([1.0, 0.0, 0.0], 2).is_ok());
    }
}
