//! Finite group actions and characteristics of the admitted symmetry
//! generators.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprs::{Expr, Slots};
use crate::jet::MultiIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Generator {
    X1,
    X2,
    X3,
    XInf,
    X0_1,
    X0_2,
    X0_3,
    X0_4,
    X0_5,
    X0Inf,
}

impl Generator {
    pub const ALL: [Generator; 10] = [
        Generator::X1,
        Generator::X2,
        Generator::X3,
        Generator::XInf,
        Generator::X0_1,
        Generator::X0_2,
        Generator::X0_3,
        Generator::X0_4,
        Generator::X0_5,
        Generator::X0Inf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::X1 => "X1",
            Generator::X2 => "X2",
            Generator::X3 => "X3",
            Generator::XInf => "Xinf",
            Generator::X0_1 => "X0_1",
            Generator::X0_2 => "X0_2",
            Generator::X0_3 => "X0_3",
            Generator::X0_4 => "X0_4",
            Generator::X0_5 => "X0_5",
            Generator::X0Inf => "X0_inf",
        }
    }

    /// Generators that are admitted only when β = 0.
    pub fn beta0_only(self) -> bool {
        matches!(
            self,
            Generator::X0_2 | Generator::X0_3 | Generator::X0_4 | Generator::X0_5 | Generator::X0Inf
        )
    }

    pub fn slot_names(self) -> &'static [&'static str] {
        match self {
            Generator::XInf => &["f", "g"],
            Generator::X0Inf => &["phi", "psi", "chi"],
            _ => &[],
        }
    }

    pub fn check_regime(self, beta: f64) -> Result<()> {
        if self.beta0_only() && beta != 0.0 {
            return Err(Error::RegimeMismatch(format!("{} is admitted only for beta = 0", self.name())));
        }
        Ok(())
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .iter()
            .copied()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

fn slot(name: &str) -> Expr {
    Expr::slot(name, Expr::t())
}

fn slot_d(name: &str, d: u8) -> Expr {
    Expr::slot_d(name, d, Expr::t())
}

/// One-parameter group element exp(εX).
#[derive(Clone, Debug)]
pub struct GroupAction {
    pub generator: Generator,
    pub epsilon: f64,
    pub slots: Slots,
}

impl GroupAction {
    pub fn new(generator: Generator, epsilon: f64, slots: Slots) -> Result<Self> {
        for s in generator.slot_names() {
            if !slots.contains_key(*s) {
                return Err(Error::MissingSlot(s.to_string()));
            }
        }
        Ok(GroupAction {
            generator,
            epsilon,
            slots,
        })
    }
}

/// Image of the solution `h` under the action; the result is again an
/// expression in (t, x, y).
pub fn transform_solution(action: &GroupAction, h: &Expr, beta: f64) -> Result<Expr> {
    let g = action.generator;
    g.check_regime(beta)?;
    let e = action.epsilon;
    let (t, x, y) = (Expr::t(), Expr::x(), Expr::y());
    let at = |tt: &Expr, xx: &Expr, yy: &Expr| h.substitute_coords([tt, xx, yy]);
    Ok(match g {
        Generator::X1 | Generator::X0_1 => at(&(&t - e), &x, &y),
        Generator::X2 => at(&t, &x, &(&y - e)),
        Generator::X3 => (3.0 * e).exp() * at(&(e.exp() * &t), &((-e).exp() * &x), &((-e).exp() * &y)),
        Generator::XInf => at(&t, &(&x - e * slot("f")), &y) + e * (slot("g") - &y * slot_d("f", 1)),
        Generator::X0_2 => (-e).exp() * at(&((-e).exp() * &t), &x, &y),
        Generator::X0_3 => {
            let (c, s) = (e.cos(), e.sin());
            at(&t, &(c * &x - s * &y), &(s * &x + c * &y))
        }
        Generator::X0_4 => (2.0 * e).exp() * at(&t, &((-e).exp() * &x), &((-e).exp() * &y)),
        Generator::X0_5 => {
            // Flow of ty∂x − tx∂y − r²/2 ∂H: t is constant, (x, y) rotates by
            // angle εt, r² is preserved, so H decreases linearly by εr²/2.
            let a = e * &t;
            let (c, s) = (a.cos(), a.sin());
            at(&t, &(&c * &x - &s * &y), &(&s * &x + &c * &y)) - e / 2.0 * (x.powi(2) + y.powi(2))
        }
        Generator::X0Inf => {
            // x̄ = x + εφ, ȳ = y + εψ; integrating dH/ds along the flow gives
            // ε(xψ′ − yφ′ + χ) + ε²/2 (φψ′ − ψφ′) in the old variables.
            let (phi, psi, chi) = (slot("phi"), slot("psi"), slot("chi"));
            let (dphi, dpsi) = (slot_d("phi", 1), slot_d("psi", 1));
            at(&t, &(&x - e * &phi), &(&y - e * &psi)) + e * (&x * &dpsi - &y * &dphi + chi)
                - e * e / 2.0 * (&phi * &dpsi - &psi * &dphi)
        }
    })
}

/// Evolutionary representative η̂ = η − ξᵗH_t − ξˣH_x − ξʸH_y.
#[derive(Clone, Debug)]
pub struct Characteristic {
    pub generator: Generator,
    pub eta: Expr,
    pub slots: Slots,
}

pub fn characteristic(generator: Generator, slots: &Slots) -> Result<Characteristic> {
    for s in generator.slot_names() {
        if !slots.contains_key(*s) {
            return Err(Error::MissingSlot(s.to_string()));
        }
    }
    let (t, x, y) = (Expr::t(), Expr::x(), Expr::y());
    let h = Expr::h(0, 0, 0);
    let (ht, hx, hy) = (Expr::h(1, 0, 0), Expr::h(0, 1, 0), Expr::h(0, 0, 1));
    let eta = match generator {
        Generator::X1 | Generator::X0_1 => -&ht,
        Generator::X2 => -&hy,
        Generator::X3 => 3.0 * &h + &t * &ht - &x * &hx - &y * &hy,
        Generator::XInf => slot("g") - &y * slot_d("f", 1) - slot("f") * &hx,
        Generator::X0_2 => -&h - &t * &ht,
        Generator::X0_3 => -&y * &hx + &x * &hy,
        Generator::X0_4 => 2.0 * &h - &x * &hx - &y * &hy,
        Generator::X0_5 => -(x.powi(2) + y.powi(2)) / 2.0 - &t * &y * &hx + &t * &x * &hy,
        Generator::X0Inf => {
            &x * slot_d("psi", 1) - &y * slot_d("phi", 1) + slot("chi") - slot("phi") * &hx - slot("psi") * &hy
        }
    };
    let slots = generator
        .slot_names()
        .iter()
        .map(|n| (n.to_string(), slots[*n].clone()))
        .collect();
    Ok(Characteristic {
        generator,
        eta,
        slots,
    })
}

/// Prolonged action Σ_{|α|≤m} D^α(η̂) ∂e/∂H_α.
pub fn frechet_apply(chi: &Characteristic, e: &Expr, max_order: usize) -> Result<Expr> {
    let need = e.max_field_order();
    if need > max_order {
        return Err(Error::OrderExceeded {
            needed: need,
            available: max_order,
        });
    }
    let mut d_eta: HashMap<MultiIndex, Expr> = HashMap::new();
    d_eta.insert(MultiIndex::ZERO, chi.eta.clone());
    let mut terms = Vec::new();
    for (field, a) in e.fields() {
        if field != 0 {
            continue;
        }
        let de = derived(&mut d_eta, a);
        terms.push(de * e.jetvar_partial(0, a));
    }
    Ok(Expr::sum(terms))
}

fn derived(cache: &mut HashMap<MultiIndex, Expr>, a: MultiIndex) -> Expr {
    if let Some(e) = cache.get(&a) {
        return e.clone();
    }
    let path = a.path();
    let last = *path.last().expect("nonzero index");
    let prev = a.checked_sub(MultiIndex::unit(last)).expect("path is consistent");
    let e = derived(cache, prev).total_derivative(last);
    cache.insert(a, e.clone());
    e
}

/// Merges the generator slots into a solution's slots; the caller's names
/// must not collide.
pub fn merged_slots(a: &Slots, b: &Slots) -> Result<Slots> {
    let mut out: BTreeMap<_, _> = a.clone();
    for (k, v) in b {
        if out.insert(k.clone(), v.clone()).is_some() {
            return Err(Error::Invalid(format!("slot name `{k}` used twice")));
        }
    }
    Ok(out)
}
