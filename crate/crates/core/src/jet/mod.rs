//! Truncated multivariate Taylor jets in (t, x, y).
//!
//! A jet of order K stores every partial derivative of total order ≤ K at a
//! single expansion point. Coefficients are derivative values, not Taylor
//! coefficients, so products use multinomial Leibniz weights.

mod index;
mod scalar;
mod smooth;

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use index::{coeff_count, MultiIndex, Var, DEFAULT_ORDER, MAX_ORDER, MAX_USER_ORDER};
pub use scalar::Scalar;
pub use smooth::SmoothFn;

use index::tables;

const DIV_EPS: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S: Scalar> {
    order: usize,
    point: [f64; 3],
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    fn check_order(order: usize) -> Result<()> {
        if order > MAX_ORDER {
            return Err(Error::OrderExceeded {
                needed: order,
                available: MAX_ORDER,
            });
        }
        Ok(())
    }

    pub fn constant(value: S, point: [f64; 3], order: usize) -> Self {
        let mut coeffs = vec![S::zero(); coeff_count(order.min(MAX_ORDER))];
        coeffs[0] = value;
        Jet {
            order: order.min(MAX_ORDER),
            point,
            coeffs,
        }
    }

    /// Jet of the coordinate function `var` at `point`.
    pub fn seed(point: [f64; 3], var: Var, order: usize) -> Self {
        Self::variable(S::from_f64(point[var.index()]), var, point, order)
    }

    /// Jet of `value + (var − var₀)`: a seed with an arbitrary base value.
    pub fn variable(value: S, var: Var, point: [f64; 3], order: usize) -> Self {
        let mut j = Self::constant(value, point, order);
        if j.order >= 1 {
            let s = tables().slot(MultiIndex::unit(var));
            j.coeffs[s] = S::one();
        }
        j
    }

    pub fn from_fn(point: [f64; 3], order: usize, mut f: impl FnMut(MultiIndex) -> S) -> Result<Self> {
        Self::check_order(order)?;
        let coeffs = MultiIndex::all_up_to(order).iter().map(|&a| f(a)).collect();
        Ok(Jet {
            order,
            point,
            coeffs,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn point(&self) -> [f64; 3] {
        self.point
    }

    pub fn value(&self) -> S {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Derivative value at `a`; zero beyond the stored order.
    pub fn get(&self, a: MultiIndex) -> S {
        if a.degree() > self.order {
            S::zero()
        } else {
            self.coeffs[tables().slot(a)]
        }
    }

    pub fn set(&mut self, a: MultiIndex, v: S) -> Result<()> {
        if a.degree() > self.order {
            return Err(Error::OrderExceeded {
                needed: a.degree(),
                available: self.order,
            });
        }
        self.coeffs[tables().slot(a)] = v;
        Ok(())
    }

    pub fn extract(&self, a: MultiIndex) -> Result<S> {
        if a.degree() > self.order {
            return Err(Error::OrderExceeded {
                needed: a.degree(),
                available: self.order,
            });
        }
        Ok(self.get(a))
    }

    /// Jet of the derivative field ∂^a f, of order K − |a|.
    pub fn extract_jet(&self, a: MultiIndex) -> Result<Jet<S>> {
        let d = a.degree();
        if d > self.order {
            return Err(Error::OrderExceeded {
                needed: d,
                available: self.order,
            });
        }
        let order = self.order - d;
        let t = tables();
        let coeffs = MultiIndex::all_up_to(order)
            .iter()
            .map(|&b| self.coeffs[t.slot(a.add(b))])
            .collect();
        Ok(Jet {
            order,
            point: self.point,
            coeffs,
        })
    }

    pub fn derivative(&self, v: Var) -> Result<Jet<S>> {
        self.extract_jet(MultiIndex::unit(v))
    }

    pub fn truncate(&self, order: usize) -> Result<Jet<S>> {
        if order > self.order {
            return Err(Error::OrderExceeded {
                needed: order,
                available: self.order,
            });
        }
        Ok(Jet {
            order,
            point: self.point,
            coeffs: self.coeffs[..coeff_count(order)].to_vec(),
        })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Jet<T> {
        Jet {
            order: self.order,
            point: self.point,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn to_complex(&self) -> Jet<Complex64> {
        self.map(|c| c.to_complex())
    }

    pub fn max_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.modulus()).fold(0.0, f64::max)
    }

    fn zip(&self, o: &Jet<S>, f: impl Fn(S, S) -> S) -> Jet<S> {
        let order = self.order.min(o.order);
        let n = coeff_count(order);
        Jet {
            order,
            point: self.point,
            coeffs: (0..n).map(|i| f(self.coeffs[i], o.coeffs[i])).collect(),
        }
    }

    pub fn scale(&self, s: S) -> Jet<S> {
        self.map(|c| c * s)
    }

    pub fn add_scalar(&self, s: S) -> Jet<S> {
        let mut r = self.clone();
        r.coeffs[0] += s;
        r
    }

    fn mul_into(&self, o: &Jet<S>, order: usize) -> Vec<S> {
        let t = tables();
        (0..coeff_count(order))
            .map(|n| {
                let mut acc = S::zero();
                for &(b, c, w) in &t.leibniz[n] {
                    let p = self.coeffs[b as usize] * o.coeffs[c as usize];
                    acc += if w == 1.0 { p } else { p * S::from_f64(w) };
                }
                acc
            })
            .collect()
    }

    pub fn mul_jet(&self, o: &Jet<S>) -> Jet<S> {
        let order = self.order.min(o.order);
        Jet {
            order,
            point: self.point,
            coeffs: self.mul_into(o, order),
        }
    }

    /// g(self) where `derivs[n]` is g⁽ⁿ⁾ at the value of `self`.
    pub fn compose(&self, derivs: &[S]) -> Jet<S> {
        let order = self.order;
        debug_assert!(derivs.len() > order);
        let mut d = self.clone();
        d.coeffs[0] = S::zero();
        let mut out = Jet::constant(derivs[0], self.point, order);
        let mut pow = Jet::constant(S::one(), self.point, order);
        let mut fact = 1.0;
        for (n, &g) in derivs.iter().enumerate().take(order + 1).skip(1) {
            pow = pow.mul_jet(&d);
            fact *= n as f64;
            let w = g * S::from_f64(1.0 / fact);
            for (o, p) in out.coeffs.iter_mut().zip(&pow.coeffs) {
                *o += *p * w;
            }
        }
        out
    }

    fn guard_nonzero(&self, what: &str) -> Result<()> {
        let v = self.value().modulus();
        if !(v > DIV_EPS) || !v.is_finite() {
            return Err(Error::domain(format!("{what} with value {:?}", self.value())));
        }
        Ok(())
    }

    pub fn recip(&self) -> Result<Jet<S>> {
        self.guard_nonzero("reciprocal")?;
        let a = self.value();
        let inv = S::one() / a;
        let mut derivs = Vec::with_capacity(self.order + 1);
        let mut c = inv;
        for n in 0..=self.order {
            derivs.push(c);
            c = c * S::from_f64(-((n + 1) as f64)) * inv;
        }
        Ok(self.compose(&derivs))
    }

    pub fn try_div(&self, o: &Jet<S>) -> Result<Jet<S>> {
        o.guard_nonzero("division by near-zero")?;
        Ok(self.mul_jet(&o.recip()?))
    }

    pub fn exp(&self) -> Jet<S> {
        let e = self.value().exp();
        self.compose(&vec![e; self.order + 1])
    }

    pub fn sin(&self) -> Jet<S> {
        let (s, c) = (self.value().sin(), self.value().cos());
        let cyc = [s, c, -s, -c];
        let d: Vec<S> = (0..=self.order).map(|n| cyc[n % 4]).collect();
        self.compose(&d)
    }

    pub fn cos(&self) -> Jet<S> {
        let (s, c) = (self.value().sin(), self.value().cos());
        let cyc = [c, -s, -c, s];
        let d: Vec<S> = (0..=self.order).map(|n| cyc[n % 4]).collect();
        self.compose(&d)
    }

    pub fn ln(&self) -> Result<Jet<S>> {
        let a = self.value();
        let l = a.ln()?;
        let inv = S::one() / a;
        let mut derivs = vec![l];
        let mut c = inv;
        for n in 1..=self.order {
            derivs.push(c);
            c = c * S::from_f64(-(n as f64)) * inv;
        }
        Ok(self.compose(&derivs))
    }

    /// Real power x^p for x in the domain of `Scalar::powf`.
    pub fn powf(&self, p: f64) -> Result<Jet<S>> {
        let a = self.value();
        let mut derivs = Vec::with_capacity(self.order + 1);
        let mut coef = 1.0;
        for n in 0..=self.order {
            derivs.push(a.powf(p - n as f64)? * S::from_f64(coef));
            coef *= p - n as f64;
        }
        Ok(self.compose(&derivs))
    }

    pub fn sqrt(&self) -> Result<Jet<S>> {
        self.value().sqrt()?;
        self.powf(0.5)
    }

    pub fn powi(&self, n: i32) -> Result<Jet<S>> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut out = Jet::constant(S::one(), self.point, self.order);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul_jet(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_jet(&base);
            }
        }
        Ok(out)
    }
}

impl<S: Scalar> Add for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, o: &Jet<S>) -> Jet<S> {
        self.zip(o, |a, b| a + b)
    }
}

impl<S: Scalar> Sub for &Jet<S> {
    type Output = Jet<S>;
    fn sub(self, o: &Jet<S>) -> Jet<S> {
        self.zip(o, |a, b| a - b)
    }
}

impl<S: Scalar> Mul for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, o: &Jet<S>) -> Jet<S> {
        self.mul_jet(o)
    }
}

impl<S: Scalar> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        self.map(|c| -c)
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Jet<S>;
    fn add(self, o: Jet<S>) -> Jet<S> {
        &self + &o
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Jet<S>;
    fn sub(self, o: Jet<S>) -> Jet<S> {
        &self - &o
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, o: Jet<S>) -> Jet<S> {
        self.mul_jet(&o)
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn seed_is_coordinate() {
        let j = Jet::<f64>::seed([2.0, 0.0, 0.0], Var::T, 2);
        assert_eq!(j.value(), 2.0);
        assert_eq!(j.get(MultiIndex::new(1, 0, 0)), 1.0);
        assert_eq!(j.get(MultiIndex::new(0, 1, 0)), 0.0);
        let sq = &j * &j;
        assert_eq!(sq.value(), 4.0);
        assert_eq!(sq.get(MultiIndex::new(1, 0, 0)), 4.0);
        assert_eq!(sq.get(MultiIndex::new(2, 0, 0)), 2.0);
        let x = Jet::<f64>::seed([0.0, 1.0, 1.0], Var::X, 4);
        assert_eq!(x.get(MultiIndex::new(0, 1, 0)), 1.0);
        assert_eq!(x.get(MultiIndex::new(0, 2, 0)), 0.0);
    }

    #[test]
    fn exp_at_zero() {
        let t = Jet::<f64>::seed([0.0; 3], Var::T, 3);
        let e = t.exp();
        for n in 0..=3u8 {
            assert!(close(e.get(MultiIndex::new(n, 0, 0)), 1.0));
        }
    }

    #[test]
    fn self_division_is_one() {
        let p = [0.3, -0.2, 0.7];
        let t = Jet::<f64>::seed(p, Var::T, 4);
        let x = Jet::<f64>::seed(p, Var::X, 4);
        let a = (&t * &x).sin().add_scalar(2.0);
        let q = a.try_div(&a).unwrap();
        assert!(close(q.value(), 1.0));
        for c in &q.coeffs()[1..] {
            assert!(c.abs() < 1e-13);
        }
    }

    #[test]
    fn extract_and_extract_jet() {
        let p = [3.0, 5.0, 0.0];
        let t = Jet::<f64>::seed(p, Var::T, 4);
        let x = Jet::<f64>::seed(p, Var::X, 4);
        let f = &(&t * &t) * &x;
        assert_eq!(f.extract(MultiIndex::new(1, 1, 0)).unwrap(), 6.0);
        let fxx = f.extract_jet(MultiIndex::new(0, 2, 0)).unwrap();
        assert_eq!(fxx.order(), 2);
        assert!(f.extract(MultiIndex::new(3, 2, 0)).is_err());
    }

    #[test]
    fn domain_errors() {
        let t = Jet::<f64>::seed([-1.0, 0.0, 0.0], Var::T, 2);
        assert!(matches!(t.ln(), Err(Error::Domain(_))));
        assert!(matches!(t.sqrt(), Err(Error::Domain(_))));
        let z = Jet::<f64>::constant(0.0, [0.0; 3], 2);
        assert!(matches!(t.try_div(&z), Err(Error::Domain(_))));
        let tc = t.to_complex();
        assert!(tc.ln().is_ok());
    }

    #[test]
    fn powers_agree() {
        let p = [1.3, 0.4, -0.2];
        let t = Jet::<f64>::seed(p, Var::T, 5);
        let y = Jet::<f64>::seed(p, Var::Y, 5);
        let a = (&t + &(&y * &y)).add_scalar(0.5);
        let p3 = a.powi(3).unwrap();
        let pf = a.powf(3.0).unwrap();
        let pm = a.powi(-2).unwrap();
        let rm = a.recip().unwrap();
        let rm2 = &rm * &rm;
        for i in 0..p3.coeffs().len() {
            assert!(close(p3.coeffs()[i], pf.coeffs()[i]));
            assert!(close(pm.coeffs()[i], rm2.coeffs()[i]));
        }
        let s = a.sqrt().unwrap();
        let back = &s * &s;
        for i in 0..back.coeffs().len() {
            assert!(close(back.coeffs()[i], a.coeffs()[i]));
        }
    }

    #[test]
    fn order_is_minimum() {
        let a = Jet::<f64>::seed([0.0; 3], Var::T, 4);
        let b = Jet::<f64>::seed([0.0; 3], Var::X, 2);
        assert_eq!((&a * &b).order(), 2);
        assert_eq!((&a + &b).order(), 2);
    }
}
