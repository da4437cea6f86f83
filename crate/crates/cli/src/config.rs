//! Run configuration: a versioned JSON file, overridden by flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use geofol_core::numerics::fd::FdConfig;
use geofol_core::numerics::spectral::{Mode, SpectralConfig};
use geofol_core::numerics::theta::ThetaParams;

use crate::suite::Settings;
use crate::CliError;

pub const SCHEMA: u32 = 1;
pub const SEED_ENV: &str = "GEOFOL_SEED";

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub identity: Option<f64>,
    pub table2: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSection {
    pub beta: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub t0: Option<f64>,
    pub v0: Option<f64>,
    pub theta0: Option<f64>,
    pub theta1: Option<f64>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdSection {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub sigma: Option<f64>,
    pub tau: Option<f64>,
    /// Rows written to v.csv: every `stride`-th step.
    pub stride: Option<usize>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub rho: f64,
    pub kappa: f64,
    pub nu: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSection {
    pub beta: Option<f64>,
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub cfl: Option<f64>,
    pub modes: Option<Vec<ModeSpec>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub seed: Option<u64>,
    pub beta: Option<f64>,
    pub samples: Option<usize>,
    #[serde(default)]
    pub tolerance: Tolerances,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub theta: ThetaSection,
    #[serde(default)]
    pub fd: FdSection,
    #[serde(default)]
    pub spectral: SpectralSection,
}

fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::Config(format!("{name} must be positive and finite"))),
        _ => Ok(()),
    }
}

fn finite(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !x.is_finite() => Err(CliError::Config(format!("{name} must be finite"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA {
            return Err(CliError::Config(format!("unsupported schema {} (expected {SCHEMA})", self.schema)));
        }
        finite("beta", self.beta)?;
        positive("tolerance.identity", self.tolerance.identity)?;
        positive("tolerance.table2", self.tolerance.table2)?;
        let t = &self.theta;
        for (k, v) in [("theta.beta", t.beta), ("theta.c1", t.c1), ("theta.c2", t.c2), ("theta.v0", t.v0), ("theta.theta1", t.theta1)] {
            finite(k, v)?;
        }
        positive("theta.t0", t.t0)?;
        positive("theta.theta0", t.theta0)?;
        finite("theta.lambda_min", t.lambda_min)?;
        finite("theta.lambda_max", t.lambda_max)?;
        positive("fd.sigma", self.fd.sigma)?;
        positive("fd.tau", self.fd.tau)?;
        let s = &self.spectral;
        finite("spectral.beta", s.beta)?;
        positive("spectral.dt", s.dt)?;
        positive("spectral.t_end", s.t_end)?;
        positive("spectral.cfl", s.cfl)?;
        if let Some(n) = s.n {
            if n < 4 || !n.is_power_of_two() {
                return Err(CliError::Config("spectral.n must be a power of two >= 4".into()));
            }
        }
        Ok(())
    }

    /// Seed from the flag, then the file, then the environment, then 0.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(s) = flag.or(self.seed) {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
            Err(_) => Ok(0),
        }
    }

    pub fn beta(&self, flag: Option<f64>) -> f64 {
        flag.or(self.beta).unwrap_or(1.0)
    }

    pub fn settings(&self, seed: Option<u64>, beta: Option<f64>) -> Result<Settings, CliError> {
        let d = Settings::default();
        Ok(Settings {
            seed: self.seed(seed)?,
            beta: self.beta(beta),
            identity_tol: self.tolerance.identity.unwrap_or(d.identity_tol),
            table2_tol: self.tolerance.table2.unwrap_or(d.table2_tol),
        })
    }

    pub fn output(&self, flag: Option<&Path>) -> Option<PathBuf> {
        flag.map(Path::to_path_buf).or_else(|| self.output.clone())
    }

    pub fn theta_params(&self) -> ThetaParams {
        let d = ThetaParams::reference();
        let t = &self.theta;
        ThetaParams {
            beta: t.beta.unwrap_or(d.beta),
            c1: t.c1.unwrap_or(d.c1),
            c2: t.c2.unwrap_or(d.c2),
            t0: t.t0.unwrap_or(d.t0),
            v0: t.v0.unwrap_or(d.v0),
            theta0: t.theta0.unwrap_or(d.theta0),
            theta1: t.theta1.unwrap_or(d.theta1),
        }
    }

    pub fn lambda_range(&self) -> (f64, f64) {
        let d = crate::suite::LAMBDA_RANGE;
        (self.theta.lambda_min.unwrap_or(d.0), self.theta.lambda_max.unwrap_or(d.1))
    }

    pub fn fd_config(&self, base: FdConfig) -> FdConfig {
        let f = &self.fd;
        FdConfig {
            m: f.m.unwrap_or(base.m),
            n: f.n.unwrap_or(base.n),
            sigma: f.sigma.unwrap_or(base.sigma),
            tau: f.tau.unwrap_or(base.tau),
            ..base
        }
    }

    pub fn spectral_config(&self) -> SpectralConfig {
        let d = SpectralConfig::default();
        let s = &self.spectral;
        SpectralConfig {
            beta: s.beta.or(self.beta).unwrap_or(d.beta),
            n: s.n.unwrap_or(d.n),
            dt: s.dt.unwrap_or(d.dt),
            t_end: s.t_end.unwrap_or(d.t_end),
            cfl: s.cfl.unwrap_or(d.cfl),
        }
    }

    pub fn spectral_modes(&self) -> Option<Vec<Mode>> {
        self.spectral.modes.as_ref().map(|ms| {
            ms.iter()
                .map(|m| Mode {
                    phase: m.phase,
                    ..Mode::new(m.rho, m.kappa, m.nu)
                })
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal() {
        let c = RunConfig::parse(r#"{"schema": 1}"#).unwrap();
        assert_eq!(c.beta(None), 1.0);
        assert_eq!(c.seed(Some(4)).unwrap(), 4);
    }

    #[test]
    fn rejects_unknown_keys_and_schema() {
        assert!(RunConfig::parse(r#"{"schema": 1, "betta": 2}"#).is_err());
        assert!(RunConfig::parse(r#"{"schema": 1, "fd": {"q": 1}}"#).is_err());
        assert!(RunConfig::parse(r#"{"schema": 2}"#).is_err());
        assert!(RunConfig::parse(r#"{"beta": 1}"#).is_err());
        assert!(RunConfig::parse(r#"{"schema": 1, "spectral": {"n": 48}}"#).is_err());
    }

    #[test]
    fn overrides() {
        let c = RunConfig::parse(r#"{"schema": 1, "beta": 2.5, "theta": {"t0": 0.2}, "fd": {"m": 11}}"#).unwrap();
        assert_eq!(c.beta(None), 2.5);
        assert_eq!(c.beta(Some(0.0)), 0.0);
        assert_eq!(c.theta_params().t0, 0.2);
        assert_eq!(c.fd_config(FdConfig::scenario_a()).m, 11);
        assert_eq!(c.spectral_config().beta, 2.5);
    }
}
