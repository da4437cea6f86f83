//! Explicit finite-difference march for the velocity component v(x, t)
//! driven by a tabulated θ(λ), λ = t²v.
//!
//! Relation 1: v_m^{n+1} = v_m^n + (τ/σ)(v_{m+1}^n − v_m^n) ln θ_m^n / t_n² − 2τλ_m^n / t_n³.
//! Relation 2: v_{m+1}^n = v_m^n + (σ/t_n) θ_m^n / θ′_m^n.

use serde::Serialize;

use super::csv_row;
use super::theta::ThetaSolution;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FdMarch {
    /// Relation 1 advances the left boundary; relation 2 fills the row.
    /// Relation-1 predictions at the other nodes are the diagnostic.
    BoundaryFill,
    /// Relation 1 at every node but the last, relation 2 at the right
    /// boundary; relation 2 across the row is the diagnostic.
    Relation1Interior,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FdConfig {
    pub t0: f64,
    /// v at the left boundary at t₀.
    pub v0: f64,
    /// Number of x points.
    pub m: usize,
    /// Number of time steps.
    pub n: usize,
    pub sigma: f64,
    pub tau: f64,
    pub march: FdMarch,
}

pub const SIGMA: f64 = 0.02;
pub const TAU: f64 = 0.0625 * SIGMA * SIGMA;

impl FdConfig {
    /// t₀ = 0.1, v₀ = 1, x ∈ [0, 2], t ∈ [0.1, 0.2].
    pub fn scenario_a() -> Self {
        FdConfig {
            t0: 0.1,
            v0: 1.0,
            m: 101,
            n: 4000,
            sigma: SIGMA,
            tau: TAU,
            march: FdMarch::BoundaryFill,
        }
    }

    /// t₀ = 0.98, v₀ = −6.55; the right boundary sits just inside λ_c.
    pub fn scenario_b() -> Self {
        FdConfig {
            t0: 0.98,
            v0: -6.55,
            m: 98,
            n: 8000,
            ..Self::scenario_a()
        }
    }

    /// σ/2, τ/4 over the same extent.
    pub fn refined(&self) -> Self {
        FdConfig {
            m: 2 * (self.m - 1) + 1,
            n: 4 * self.n,
            sigma: self.sigma / 2.0,
            tau: self.tau / 4.0,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 || !(self.sigma > 0.0) || !(self.tau > 0.0) || !(self.t0 > 0.0) || !self.v0.is_finite() {
            return Err(Error::Invalid("fd: need m >= 2, sigma > 0, tau > 0, t0 > 0".into()));
        }
        if self.tau >= self.sigma * self.sigma {
            return Err(Error::Invalid(format!("fd: tau = {} must be below sigma^2 = {}", self.tau, self.sigma * self.sigma)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Truncation {
    /// First step that could not be completed.
    pub step: usize,
    pub kind: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FdGrid {
    pub config: FdConfig,
    /// Completed rows; row n is at t₀ + nτ.
    pub v: Vec<Vec<f64>>,
    /// Consistency norm of the other relation, one entry per step.
    pub consistency: Vec<f64>,
    pub truncated: Option<Truncation>,
}

fn ratio(theta: &ThetaSolution, lambda: f64) -> Result<(f64, f64)> {
    let (th, dth, _) = theta.eval(lambda)?;
    Ok((th, th / dth))
}

/// Row at time t from relation 2, starting at v₀.
fn fill(theta: &ThetaSolution, cfg: &FdConfig, v0: f64, t: f64) -> Result<Vec<f64>> {
    let mut row = Vec::with_capacity(cfg.m);
    row.push(v0);
    for m in 0..cfg.m - 1 {
        let (_, q) = ratio(theta, t * t * row[m])?;
        row.push(row[m] + cfg.sigma / t * q);
    }
    Ok(row)
}

/// Relation-1 predictions at nodes 0..m−2.
fn relation1(theta: &ThetaSolution, cfg: &FdConfig, row: &[f64], t: f64) -> Result<Vec<f64>> {
    (0..cfg.m - 1)
        .map(|m| {
            let l = t * t * row[m];
            let (th, _) = ratio(theta, l)?;
            Ok(row[m] + cfg.tau / cfg.sigma * (row[m + 1] - row[m]) * th.ln() / (t * t) - 2.0 * cfg.tau * l / t.powi(3))
        })
        .collect()
}

fn step(theta: &ThetaSolution, cfg: &FdConfig, row: &[f64], t: f64) -> Result<(Vec<f64>, f64)> {
    let pred = relation1(theta, cfg, row, t)?;
    let t1 = t + cfg.tau;
    match cfg.march {
        FdMarch::BoundaryFill => {
            let next = fill(theta, cfg, pred[0], t1)?;
            let dev = pred.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            Ok((next, dev))
        }
        FdMarch::Relation1Interior => {
            let mut next = pred;
            let last = next[cfg.m - 2];
            let (_, q) = ratio(theta, t1 * t1 * last)?;
            next.push(last + cfg.sigma / t1 * q);
            let mut dev = 0.0f64;
            for m in 0..cfg.m - 1 {
                let (_, q) = ratio(theta, t1 * t1 * next[m])?;
                dev = dev.max((next[m + 1] - next[m] - cfg.sigma / t1 * q).abs());
            }
            Ok((next, dev))
        }
    }
}

pub fn run_fd(theta: &ThetaSolution, cfg: &FdConfig) -> Result<FdGrid> {
    cfg.validate()?;
    let first = fill(theta, cfg, cfg.v0, cfg.t0)?;
    let mut grid = FdGrid {
        config: *cfg,
        v: vec![first],
        consistency: Vec::new(),
        truncated: None,
    };
    for n in 0..cfg.n {
        let t = cfg.t0 + n as f64 * cfg.tau;
        let row = grid.v.last().expect("nonempty");
        match step(theta, cfg, row, t) {
            Ok((next, _)) if next.iter().any(|v| !v.is_finite()) => {
                grid.truncated = Some(truncation(n, &Error::BlowUp(n)));
                break;
            }
            Ok((next, dev)) => {
                grid.v.push(next);
                grid.consistency.push(dev);
            }
            Err(e) => {
                grid.truncated = Some(truncation(n, &e));
                break;
            }
        }
    }
    Ok(grid)
}

fn truncation(step: usize, e: &Error) -> Truncation {
    Truncation {
        step,
        kind: e.kind(),
        detail: e.to_string(),
    }
}

/// Least-squares line through (x, v): (slope, correlation).
pub fn linear_fit(x: &[f64], v: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let (mut sxx, mut svv, mut sxv) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(v) {
        sxx += (a - mx) * (a - mx);
        svv += (b - mv) * (b - mv);
        sxv += (a - mx) * (b - mv);
    }
    (sxv / sxx, sxv / (sxx * svv).sqrt())
}

impl FdGrid {
    pub fn time(&self, n: usize) -> f64 {
        self.config.t0 + n as f64 * self.config.tau
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.config.m).map(|m| m as f64 * self.config.sigma).collect()
    }

    pub fn max_consistency(&self) -> f64 {
        self.consistency.iter().cloned().fold(0.0, f64::max)
    }

    pub fn row_fits(&self) -> Vec<(f64, f64)> {
        let x = self.xs();
        self.v.iter().map(|r| linear_fit(&x, r)).collect()
    }

    pub fn max_abs(&self) -> Vec<f64> {
        self.v.iter().map(|r| r.iter().fold(0.0f64, |a, b| a.max(b.abs()))).collect()
    }

    /// λ at the right boundary at t₀.
    pub fn boundary_lambda(&self) -> f64 {
        self.config.t0 * self.config.t0 * self.v[0][self.config.m - 1]
    }

    /// Worst per-row max|Δv| / max|v| against a run with σ/2, τ/4.
    pub fn refinement_error(&self, fine: &FdGrid) -> f64 {
        let mut worst = 0.0f64;
        for (n, row) in self.v.iter().enumerate() {
            let Some(f) = fine.v.get(4 * n) else { break };
            let scale = row.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let d = row.iter().enumerate().map(|(m, v)| (v - f[2 * m]).abs()).fold(0.0, f64::max);
            worst = worst.max(d / scale);
        }
        worst
    }

    /// Rows every `stride` steps as `t,x,v`.
    pub fn to_csv(&self, stride: usize) -> String {
        let mut s = String::from("t,x,v\n");
        let x = self.xs();
        for (n, row) in self.v.iter().enumerate().step_by(stride.max(1)) {
            let t = self.time(n);
            for (xm, v) in x.iter().zip(row) {
                s.push_str(&csv_row(&[t, *xm, *v]));
            }
        }
        s
    }
}
