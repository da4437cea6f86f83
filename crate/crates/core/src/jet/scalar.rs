use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar field a jet is defined over.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    /// Fails for a complex value with nonzero imaginary part in a real field.
    fn from_complex(z: Complex64) -> Result<Self>;
    fn to_complex(self) -> Complex64;
    fn modulus(self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Result<Self>;
    fn sqrt(self) -> Result<Self>;
    fn powf(self, p: f64) -> Result<Self>;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_complex(z: Complex64) -> Result<Self> {
        if z.im != 0.0 {
            return Err(Error::domain(format!(
                "complex constant {z} in a real evaluation"
            )));
        }
        Ok(z.re)
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Result<Self> {
        if self > 0.0 && self.is_finite() {
            Ok(f64::ln(self))
        } else {
            Err(Error::domain(format!("ln of non-positive value {self}")))
        }
    }
    fn sqrt(self) -> Result<Self> {
        if self > 0.0 && self.is_finite() {
            Ok(f64::sqrt(self))
        } else {
            Err(Error::domain(format!("sqrt of non-positive value {self}")))
        }
    }
    fn powf(self, p: f64) -> Result<Self> {
        if self > 0.0 && self.is_finite() {
            Ok(f64::powf(self, p))
        } else {
            Err(Error::domain(format!("real power of non-positive value {self}")))
        }
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn from_complex(z: Complex64) -> Result<Self> {
        Ok(z)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn ln(self) -> Result<Self> {
        nonzero(self, "ln").map(Complex64::ln)
    }
    fn sqrt(self) -> Result<Self> {
        nonzero(self, "sqrt").map(Complex64::sqrt)
    }
    fn powf(self, p: f64) -> Result<Self> {
        nonzero(self, "power").map(|z| z.powf(p))
    }
}

fn nonzero(z: Complex64, what: &str) -> Result<Complex64> {
    if z.norm() > 0.0 && z.is_finite() {
        Ok(z)
    } else {
        Err(Error::domain(format!("{what} of zero")))
    }
}
