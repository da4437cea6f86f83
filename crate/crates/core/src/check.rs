//! Tolerance policy and random germ sampling shared by all identity checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::jet::{Jet, MultiIndex};

/// Relative tolerance for identities that must hold exactly.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Relative tolerance for the third-order generated laws.
pub const TABLE2_TOL: f64 = 1e-8;
/// Denominators below this modulus trigger a resample.
pub const DENOM_FLOOR: f64 = 0.1;

/// A residual together with the magnitude of the terms it was built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn new(value: f64, scale: f64) -> Self {
        Residual { value, scale }
    }

    /// |r| / (1 + Σ|terms|).
    pub fn normalized(&self) -> f64 {
        self.value / (1.0 + self.scale)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.value <= tol * (1.0 + self.scale)
    }
}

/// Aggregate of many residual evaluations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub samples: usize,
    pub max_residual: f64,
    pub max_normalized: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Summary {
    pub fn new(tolerance: f64) -> Self {
        Summary {
            samples: 0,
            max_residual: 0.0,
            max_normalized: 0.0,
            tolerance,
            pass: true,
        }
    }

    pub fn push(&mut self, r: Residual) {
        self.samples += 1;
        self.max_residual = self.max_residual.max(r.value);
        let n = r.normalized();
        if n.is_nan() {
            self.max_normalized = f64::NAN;
        } else if !self.max_normalized.is_nan() {
            self.max_normalized = self.max_normalized.max(n);
        }
        self.pass = self.pass && r.passes(self.tolerance);
    }

    pub fn merge(&mut self, o: &Summary) {
        self.samples += o.samples;
        self.max_residual = self.max_residual.max(o.max_residual);
        self.max_normalized = self.max_normalized.max(o.max_normalized);
        self.pass = self.pass && o.pass;
    }
}

/// Deterministic sampler for points, parameters and random germs.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn sign(&mut self) -> f64 {
        if self.rng.gen_bool(0.5) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn point(&mut self) -> [f64; 3] {
        [self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0)]
    }

    /// Germ with all derivative values uniform in [−1, 1].
    pub fn jet(&mut self, order: usize) -> Jet<f64> {
        let p = self.point();
        Jet::from_fn(p, order, |_| self.rng.gen_range(-1.0..1.0)).expect("order within tables")
    }

    /// Random germ whose listed derivatives all have modulus ≥ `DENOM_FLOOR`.
    pub fn jet_avoiding(&mut self, order: usize, guards: &[MultiIndex]) -> Jet<f64> {
        loop {
            let j = self.jet(order);
            if guards.iter().all(|&a| j.get(a).abs() >= DENOM_FLOOR) {
                return j;
            }
        }
    }
}
