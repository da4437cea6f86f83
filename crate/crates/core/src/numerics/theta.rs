//! The θ(λ) ODE: adaptive classical RK4 with step doubling, cubic Hermite
//! dense output and singularity detection.

use serde::Serialize;

use crate::check::Residual;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaParams {
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    pub t0: f64,
    pub v0: f64,
    pub theta0: f64,
    pub theta1: f64,
}

impl ThetaParams {
    /// t₀ = 0.1, v₀ = 1, θ₀ = 0.05, θ₁ = −0.01, β = 4, C₁ = C₂ = 0.
    pub fn reference() -> Self {
        ThetaParams {
            beta: 4.0,
            c1: 0.0,
            c2: 0.0,
            t0: 0.1,
            v0: 1.0,
            theta0: 0.05,
            theta1: -0.01,
        }
    }

    pub fn lambda0(&self) -> f64 {
        self.t0 * self.t0 * self.v0
    }

    fn validate(&self) -> Result<()> {
        let all = [self.beta, self.c1, self.c2, self.t0, self.v0, self.theta0, self.theta1];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadInitialData("non-finite parameter".into()));
        }
        if self.theta0 <= 0.0 {
            return Err(Error::BadInitialData("theta0 must be positive".into()));
        }
        if self.theta0.ln() == self.c2 {
            return Err(Error::BadInitialData("ln(theta0) = C2 is singular".into()));
        }
        if self.theta1 == 0.0 {
            return Err(Error::BadInitialData("theta1 must be nonzero".into()));
        }
        Ok(())
    }

    /// θ″ from (θ, θ′) at λ.
    pub fn second_derivative(&self, lambda: f64, theta: f64, dtheta: f64) -> Result<f64> {
        if theta <= 0.0 {
            return Err(Error::domain("theta left (0, inf)"));
        }
        let l = self.c2 - theta.ln();
        if l == 0.0 || dtheta == 0.0 {
            return Err(Error::domain("singular coefficient"));
        }
        let a = (1.0 + l) * theta / dtheta - self.beta * lambda / (1.0 + self.c1 * self.c1);
        Ok(a * dtheta.powi(3) / (l * theta * theta))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepControl {
    /// Local error tolerance per accepted step, relative to 1 + |y|.
    pub tol: f64,
    pub h0: f64,
    pub h_min: f64,
    /// Caps the step so the dense output stays accurate.
    pub h_max: f64,
    pub max_steps: usize,
    /// Halt when |θ′| or |θ″| exceeds this.
    pub blowup: f64,
    /// Halt when |C₂ − ln θ| falls below this.
    pub guard: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            tol: 1e-11,
            h0: 1e-3,
            h_min: 1e-13,
            h_max: 0.5,
            max_steps: 2_000_000,
            blowup: 1e8,
            guard: 1e-8,
        }
    }
}

impl StepControl {
    pub fn refined(&self) -> Self {
        StepControl {
            tol: self.tol / 2.0,
            ..*self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaNode {
    pub lambda: f64,
    pub theta: f64,
    pub dtheta: f64,
    pub ddtheta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Halt {
    /// Reached the requested end of the range.
    Reached,
    /// |θ′| or |θ″| crossed the blow-up threshold.
    BlowUp,
    /// ln θ approached C₂ (or θ approached 0).
    GuardBand,
    /// Step size fell below the minimum.
    StepUnderflow,
    MaxSteps,
}

impl Halt {
    pub fn is_singular(self) -> bool {
        matches!(self, Halt::BlowUp | Halt::GuardBand | Halt::StepUnderflow)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaSolution {
    pub params: ThetaParams,
    /// Strictly increasing in λ.
    pub nodes: Vec<ThetaNode>,
    /// Halt reasons toward decreasing and increasing λ.
    pub halts: [Halt; 2],
    /// Singularity estimate: the first singular halt below λ₀, else above.
    pub lambda_c: Option<f64>,
}

type State = [f64; 2];

fn f(p: &ThetaParams, l: f64, y: State) -> Result<State> {
    Ok([y[1], p.second_derivative(l, y[0], y[1])?])
}

fn rk4(p: &ThetaParams, l: f64, y: State, h: f64) -> Result<State> {
    let add = |y: State, k: State, s: f64| [y[0] + s * k[0], y[1] + s * k[1]];
    let k1 = f(p, l, y)?;
    let k2 = f(p, l + h / 2.0, add(y, k1, h / 2.0))?;
    let k3 = f(p, l + h / 2.0, add(y, k2, h / 2.0))?;
    let k4 = f(p, l + h, add(y, k3, h))?;
    Ok([
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ])
}

fn node(p: &ThetaParams, l: f64, y: State) -> Result<ThetaNode> {
    Ok(ThetaNode {
        lambda: l,
        theta: y[0],
        dtheta: y[1],
        ddtheta: p.second_derivative(l, y[0], y[1])?,
    })
}

/// Integrates from λ₀ to `end`; returns the nodes after λ₀ and the halt.
fn march(p: &ThetaParams, end: f64, ctl: &StepControl) -> Result<(Vec<ThetaNode>, Halt)> {
    let dir = (end - p.lambda0()).signum();
    let mut l = p.lambda0();
    let mut y = [p.theta0, p.theta1];
    let mut h = ctl.h0;
    let mut out = Vec::new();
    if dir == 0.0 {
        return Ok((out, Halt::Reached));
    }
    for _ in 0..ctl.max_steps {
        let rest = (end - l).abs();
        if rest <= 1e-12 * (1.0 + end.abs()) {
            return Ok((out, Halt::Reached));
        }
        let step = h.min(rest).min(ctl.h_max);
        let trial = (|| -> Result<(State, State)> {
            let full = rk4(p, l, y, dir * step)?;
            let half = rk4(p, l, y, dir * step / 2.0)?;
            let two = rk4(p, l + dir * step / 2.0, half, dir * step / 2.0)?;
            Ok((full, two))
        })();
        let side = |th: f64| (p.c2 - th.ln()).signum();
        let (full, two) = match trial {
            Ok(v) if v.1.iter().all(|x| x.is_finite()) && v.1[0] > 0.0 && side(v.1[0]) == side(y[0]) => v,
            _ => {
                h = step / 4.0;
                if h < ctl.h_min {
                    return Ok((out, Halt::StepUnderflow));
                }
                continue;
            }
        };
        let err = (0..2)
            .map(|i| (two[i] - full[i]).abs() / 15.0 / (ctl.tol * (1.0 + two[i].abs())))
            .fold(0.0, f64::max);
        if err > 1.0 {
            h = step * (0.9 * err.powf(-0.2)).max(0.1);
            if h < ctl.h_min {
                return Ok((out, Halt::StepUnderflow));
            }
            continue;
        }
        l += dir * step;
        y = two;
        let n = match node(p, l, y) {
            Ok(n) => n,
            Err(_) => return Ok((out, Halt::GuardBand)),
        };
        out.push(n);
        if n.dtheta.abs() > ctl.blowup || n.ddtheta.abs() > ctl.blowup {
            return Ok((out, Halt::BlowUp));
        }
        if (p.c2 - n.theta.ln()).abs() < ctl.guard || n.theta < ctl.guard {
            return Ok((out, Halt::GuardBand));
        }
        h = step * if err == 0.0 { 2.0 } else { (0.9 * err.powf(-0.2)).min(2.0) };
    }
    Ok((out, Halt::MaxSteps))
}

pub fn solve_theta(params: &ThetaParams, lambda_min: f64, lambda_max: f64, ctl: &StepControl) -> Result<ThetaSolution> {
    params.validate()?;
    let l0 = params.lambda0();
    if !(lambda_min <= l0 && l0 <= lambda_max) {
        return Err(Error::BadInitialData(format!("lambda0 = {l0} outside [{lambda_min}, {lambda_max}]")));
    }
    let (mut low, h_low) = march(params, lambda_min, ctl)?;
    let (high, h_high) = march(params, lambda_max, ctl)?;
    low.reverse();
    let mut nodes = low;
    nodes.push(node(params, l0, [params.theta0, params.theta1])?);
    nodes.extend(high);
    let lambda_c = if h_low.is_singular() {
        Some(nodes[0].lambda)
    } else if h_high.is_singular() {
        nodes.last().map(|n| n.lambda)
    } else {
        None
    };
    Ok(ThetaSolution {
        params: *params,
        nodes,
        halts: [h_low, h_high],
        lambda_c,
    })
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let (s2, s3) = (s * s, s * s * s);
    let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * d1;
    let dv = ((6.0 * s2 - 6.0 * s) * y0 + (-6.0 * s2 + 6.0 * s) * y1) / h + (3.0 * s2 - 4.0 * s + 1.0) * d0 + (3.0 * s2 - 2.0 * s) * d1;
    (v, dv)
}

impl ThetaSolution {
    pub fn range(&self) -> (f64, f64) {
        (self.nodes[0].lambda, self.nodes[self.nodes.len() - 1].lambda)
    }

    fn bracket(&self, lambda: f64) -> Result<(&ThetaNode, &ThetaNode)> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&lambda) {
            return Err(Error::RangeExceeded(lambda));
        }
        let i = self.nodes.partition_point(|n| n.lambda <= lambda);
        let i = i.clamp(1, self.nodes.len() - 1);
        Ok((&self.nodes[i - 1], &self.nodes[i]))
    }

    /// Interpolated (θ, θ′, θ″).
    pub fn eval(&self, lambda: f64) -> Result<(f64, f64, f64)> {
        if self.nodes.len() == 1 {
            let n = self.nodes[0];
            return if lambda == n.lambda {
                Ok((n.theta, n.dtheta, n.ddtheta))
            } else {
                Err(Error::RangeExceeded(lambda))
            };
        }
        let (a, b) = self.bracket(lambda)?;
        let (th, _) = hermite(a.lambda, b.lambda, a.theta, b.theta, a.dtheta, b.dtheta, lambda);
        let (dth, ddth) = hermite(a.lambda, b.lambda, a.dtheta, b.dtheta, a.ddtheta, b.ddtheta, lambda);
        Ok((th, dth, ddth))
    }

    /// Residual of (C₂ − ln θ)θ²θ″/θ′³ − (1 + C₂ − ln θ)θ/θ′ + βλ/(1 + C₁²)
    /// for the interpolant at λ, scaled by the sum of the term magnitudes.
    pub fn ode_residual(&self, lambda: f64) -> Result<Residual> {
        let p = &self.params;
        let (th, dth, ddth) = self.eval(lambda)?;
        let l = p.c2 - th.ln();
        let terms = [
            l * th * th * ddth / dth.powi(3),
            -(1.0 + l) * th / dth,
            p.beta * lambda / (1.0 + p.c1 * p.c1),
        ];
        let v: f64 = terms.iter().sum();
        Ok(Residual::new(v.abs(), terms.iter().map(|t| t.abs()).sum()))
    }

    /// Worst normalized interpolant residual over the interval midpoints,
    /// with its location.
    pub fn max_midpoint_residual(&self) -> Result<(f64, f64)> {
        let mut worst = (0.0f64, f64::NAN);
        for w in self.nodes.windows(2) {
            let m = 0.5 * (w[0].lambda + w[1].lambda);
            let r = self.ode_residual(m)?.normalized();
            if r.is_nan() {
                return Ok((f64::NAN, m));
            }
            if r > worst.0 {
                worst = (r, m);
            }
        }
        Ok(worst)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,theta,dtheta\n");
        for n in &self.nodes {
            s.push_str(&super::csv_row(&[n.lambda, n.theta, n.dtheta]));
        }
        s
    }
}
