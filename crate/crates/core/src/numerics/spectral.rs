//! Pseudo-spectral solver for ζ_t = −H_xζ_y + H_yζ_x − βH_x, ζ = ΔH, on
//! the doubly periodic square [0, 2π)².

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::csv_row;
use super::fft::{fft2, wavenumber};
use crate::error::{Error, Result};
use crate::solutions::{SolutionId, SolutionSpec};

/// ρ cos(κx + νy + φ) at t = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Mode {
    pub rho: f64,
    pub kappa: f64,
    pub nu: f64,
    pub phase: f64,
}

impl Mode {
    pub fn new(rho: f64, kappa: f64, nu: f64) -> Self {
        Mode {
            rho,
            kappa,
            nu,
            phase: 0.0,
        }
    }

    fn k2(&self) -> f64 {
        self.kappa * self.kappa + self.nu * self.nu
    }

    /// Rossby phase speed −β/(κ² + ν²).
    pub fn phase_speed(&self, beta: f64) -> f64 {
        -beta / self.k2()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SpectralInit {
    Zero,
    Modes(Vec<Mode>),
}

fn is_int(v: f64) -> bool {
    v.is_finite() && v == v.round()
}

impl SpectralInit {
    /// A gaurvitz catalog entry with μ = 0 and integer wavenumbers.
    pub fn from_solution(spec: &SolutionSpec) -> Result<Self> {
        if spec.id != SolutionId::Gaurvitz {
            return Err(Error::NonPeriodicInit(format!("{} is not a periodic mode", spec.id)));
        }
        let p = |k: &str| spec.params.get(k).copied().unwrap_or(0.0);
        if p("mu") != 0.0 {
            return Err(Error::NonPeriodicInit("mu != 0 adds a non-periodic mu*y term".into()));
        }
        let m = Mode::new(p("rho"), p("kappa"), p("nu"));
        let init = SpectralInit::Modes(vec![m]);
        init.validate()?;
        Ok(init)
    }

    fn validate(&self) -> Result<()> {
        if let SpectralInit::Modes(ms) = self {
            for m in ms {
                if !is_int(m.kappa) || !is_int(m.nu) {
                    return Err(Error::NonPeriodicInit(format!("wavenumbers ({}, {}) are not integers", m.kappa, m.nu)));
                }
                if m.k2() == 0.0 {
                    return Err(Error::NonPeriodicInit("zero wavevector".into()));
                }
                if !m.rho.is_finite() || !m.phase.is_finite() {
                    return Err(Error::NonPeriodicInit("non-finite amplitude".into()));
                }
            }
        }
        Ok(())
    }

    fn modes(&self) -> &[Mode] {
        match self {
            SpectralInit::Zero => &[],
            SpectralInit::Modes(m) => m,
        }
    }

    /// Exact field at time t when all modes share κ² + ν².
    pub fn exact(&self, beta: f64, x: f64, y: f64, t: f64) -> Option<f64> {
        let ms = self.modes();
        if ms.windows(2).any(|w| w[0].k2() != w[1].k2()) {
            return None;
        }
        Some(
            ms.iter()
                .map(|m| m.rho * (m.kappa * (x - m.phase_speed(beta) * t) + m.nu * y + m.phase).cos())
                .sum(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralConfig {
    pub beta: f64,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    /// dt must not exceed cfl · (2π/n) / max|∇H|.
    pub cfl: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            beta: 1.0,
            n: 64,
            dt: 0.01,
            t_end: 1.0,
            cfl: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub time: f64,
    pub energy: f64,
    pub enstrophy: f64,
    pub l2_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralState {
    pub n: usize,
    pub beta: f64,
    pub time: f64,
    pub steps: usize,
    #[serde(skip)]
    pub zeta_hat: Vec<Complex64>,
    pub diagnostics: Vec<Diagnostic>,
}

struct Grid {
    n: usize,
    kx: Vec<f64>,
    ky: Vec<f64>,
    k2: Vec<f64>,
    keep: Vec<bool>,
}

impl Grid {
    fn new(n: usize) -> Self {
        let mut g = Grid {
            n,
            kx: vec![0.0; n * n],
            ky: vec![0.0; n * n],
            k2: vec![0.0; n * n],
            keep: vec![false; n * n],
        };
        let cut = n as f64 / 3.0;
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                let (ky, kx) = (wavenumber(i, n), wavenumber(j, n));
                g.kx[idx] = kx;
                g.ky[idx] = ky;
                g.k2[idx] = kx * kx + ky * ky;
                g.keep[idx] = kx.abs() < cut && ky.abs() < cut;
            }
        }
        g
    }

    fn coords(&self, idx: usize) -> (f64, f64) {
        let h = 2.0 * PI / self.n as f64;
        ((idx % self.n) as f64 * h, (idx / self.n) as f64 * h)
    }

    fn h_hat(&self, zeta: &[Complex64]) -> Vec<Complex64> {
        zeta.iter()
            .zip(&self.k2)
            .map(|(z, k2)| if *k2 == 0.0 { Complex64::new(0.0, 0.0) } else { -z / k2 })
            .collect()
    }

    fn to_physical(&self, hat: &[Complex64], mult: impl Fn(usize) -> Complex64) -> Result<Vec<f64>> {
        let mut a: Vec<Complex64> = hat.iter().enumerate().map(|(i, z)| z * mult(i)).collect();
        fft2(&mut a, self.n, true)?;
        Ok(a.into_iter().map(|z| z.re).collect())
    }

    fn dx(&self, i: usize) -> Complex64 {
        Complex64::new(0.0, self.kx[i])
    }

    fn dy(&self, i: usize) -> Complex64 {
        Complex64::new(0.0, self.ky[i])
    }

    /// Tendency of ζ̂ and max|∇H|.
    fn rhs(&self, zeta: &[Complex64], beta: f64) -> Result<(Vec<Complex64>, f64)> {
        let h = self.h_hat(zeta);
        let hx = self.to_physical(&h, |i| self.dx(i))?;
        let hy = self.to_physical(&h, |i| self.dy(i))?;
        let zx = self.to_physical(zeta, |i| self.dx(i))?;
        let zy = self.to_physical(zeta, |i| self.dy(i))?;
        let mut speed = 0.0f64;
        let mut jac: Vec<Complex64> = (0..hx.len())
            .map(|i| {
                speed = speed.max(hx[i].hypot(hy[i]));
                Complex64::new(hx[i] * zy[i] - hy[i] * zx[i], 0.0)
            })
            .collect();
        fft2(&mut jac, self.n, false)?;
        let out = (0..jac.len())
            .map(|i| {
                if self.keep[i] {
                    -jac[i] - beta * self.dx(i) * h[i]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok((out, speed))
    }

    fn norms(&self, zeta: &[Complex64]) -> (f64, f64) {
        let n4 = (self.n * self.n) as f64 * (self.n * self.n) as f64;
        let area = 4.0 * PI * PI;
        let mut e = 0.0;
        let mut z = 0.0;
        for (w, k2) in zeta.iter().zip(&self.k2) {
            if *k2 > 0.0 {
                e += w.norm_sqr() / k2;
                z += w.norm_sqr();
            }
        }
        (0.5 * area * e / n4, 0.5 * area * z / n4)
    }
}

fn add(a: &[Complex64], b: &[Complex64], s: f64) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y * s).collect()
}

pub fn run_spectral(init: &SpectralInit, cfg: &SpectralConfig) -> Result<SpectralState> {
    if !cfg.n.is_power_of_two() || cfg.n < 4 {
        return Err(Error::Invalid(format!("spectral: n = {} must be a power of two >= 4", cfg.n)));
    }
    if !(cfg.dt > 0.0) || !(cfg.t_end >= 0.0) || !cfg.beta.is_finite() {
        return Err(Error::Invalid("spectral: need dt > 0, t_end >= 0, finite beta".into()));
    }
    init.validate()?;
    let g = Grid::new(cfg.n);
    let mut h0: Vec<Complex64> = (0..cfg.n * cfg.n)
        .map(|i| {
            let (x, y) = g.coords(i);
            Complex64::new(init.exact(cfg.beta, x, y, 0.0).unwrap_or_else(|| {
                init.modes().iter().map(|m| m.rho * (m.kappa * x + m.nu * y + m.phase).cos()).sum()
            }), 0.0)
        })
        .collect();
    fft2(&mut h0, cfg.n, false)?;
    let mut zeta: Vec<Complex64> = h0
        .iter()
        .enumerate()
        .map(|(i, h)| if g.keep[i] { -h * g.k2[i] } else { Complex64::new(0.0, 0.0) })
        .collect();
    let steps = (cfg.t_end / cfg.dt - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps == 0 { 0.0 } else { cfg.t_end / steps as f64 };
    let limit_of = |speed: f64| if speed > 0.0 { cfg.cfl * 2.0 * PI / cfg.n as f64 / speed } else { f64::INFINITY };
    let mut state = SpectralState {
        n: cfg.n,
        beta: cfg.beta,
        time: 0.0,
        steps,
        zeta_hat: Vec::new(),
        diagnostics: Vec::new(),
    };
    let diag = |zeta: &[Complex64], t: f64| -> Result<Diagnostic> {
        let (energy, enstrophy) = g.norms(zeta);
        Ok(Diagnostic {
            time: t,
            energy,
            enstrophy,
            l2_error: l2_error(&g, init, cfg.beta, zeta, t)?,
        })
    };
    state.diagnostics.push(diag(&zeta, 0.0)?);
    for s in 0..steps {
        let t = s as f64 * dt;
        let (k1, speed) = g.rhs(&zeta, cfg.beta)?;
        if dt > limit_of(speed) {
            return Err(Error::CflViolation { dt, limit: limit_of(speed) });
        }
        let (k2, _) = g.rhs(&add(&zeta, &k1, dt / 2.0), cfg.beta)?;
        let (k3, _) = g.rhs(&add(&zeta, &k2, dt / 2.0), cfg.beta)?;
        let (k4, _) = g.rhs(&add(&zeta, &k3, dt), cfg.beta)?;
        for i in 0..zeta.len() {
            zeta[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if zeta.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BlowUp(s));
        }
        state.diagnostics.push(diag(&zeta, t + dt)?);
    }
    state.time = cfg.t_end.min(steps as f64 * dt);
    state.zeta_hat = zeta;
    Ok(state)
}

fn l2_error(g: &Grid, init: &SpectralInit, beta: f64, zeta: &[Complex64], t: f64) -> Result<Option<f64>> {
    if init.exact(beta, 0.0, 0.0, t).is_none() {
        return Ok(None);
    }
    let h = g.to_physical(&g.h_hat(zeta), |_| Complex64::new(1.0, 0.0))?;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, v) in h.iter().enumerate() {
        let (x, y) = g.coords(i);
        let e = init.exact(beta, x, y, t).unwrap_or(0.0);
        num += (v - e) * (v - e);
        den += e * e;
    }
    Ok(Some(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() }))
}

impl SpectralState {
    /// H on the grid, row-major with x varying fastest.
    pub fn h_grid(&self) -> Result<Vec<f64>> {
        let g = Grid::new(self.n);
        g.to_physical(&g.h_hat(&self.zeta_hat), |_| Complex64::new(1.0, 0.0))
    }

    /// max |E(t) − E(0)| / E(0) and the same for enstrophy.
    pub fn drift(&self) -> (f64, f64) {
        let d0 = self.diagnostics[0];
        let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { (a - b).abs() / b };
        self.diagnostics.iter().fold((0.0f64, 0.0f64), |(e, z), d| {
            (e.max(rel(d.energy, d0.energy)), z.max(rel(d.enstrophy, d0.enstrophy)))
        })
    }

    pub fn final_l2_error(&self) -> Option<f64> {
        self.diagnostics.last().and_then(|d| d.l2_error)
    }

    pub fn diag_csv(&self) -> String {
        let mut s = String::from("time,energy,enstrophy,l2_error_vs_exact\n");
        for d in &self.diagnostics {
            s.push_str(&csv_row(&[d.time, d.energy, d.enstrophy, d.l2_error.unwrap_or(f64::NAN)]));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stays_zero() {
        let s = run_spectral(&SpectralInit::Zero, &SpectralConfig::default()).unwrap();
        assert!(s.zeta_hat.iter().all(|z| z.norm() == 0.0));
        assert_eq!(s.final_l2_error(), Some(0.0));
    }

    #[test]
    fn non_integer_wavenumber_is_rejected() {
        let init = SpectralInit::Modes(vec![Mode::new(0.1, 0.5, 1.0)]);
        assert!(matches!(run_spectral(&init, &SpectralConfig::default()), Err(Error::NonPeriodicInit(_))));
    }

    #[test]
    fn cfl_is_enforced() {
        let init = SpectralInit::Modes(vec![Mode::new(5.0, 1.0, 1.0)]);
        let cfg = SpectralConfig { dt: 0.2, ..Default::default() };
        assert!(matches!(run_spectral(&init, &cfg), Err(Error::CflViolation { .. })));
    }
}
