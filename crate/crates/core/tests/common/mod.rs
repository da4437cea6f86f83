//! Independent oracles shared by the integration tests: closed forms
//! evaluated both as jets and as plain functions, Richardson-extrapolated
//! finite differences, and total derivatives compared with jet extraction.
#![allow(dead_code)]

use std::ops::{Add, Mul, Neg, Sub};

use geofol_core::check::Sampler;
use geofol_core::exprs::{Expr, Slots};
use geofol_core::jet::{Jet, MultiIndex, SmoothFn, Var};

pub const ORDER: usize = 3;

pub trait Num: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn k(&self, v: f64) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn inv(&self) -> Self;
    fn pw(&self, n: i32) -> Self;
}

impl Num for f64 {
    fn k(&self, v: f64) -> f64 {
        v
    }
    fn sin(&self) -> f64 {
        f64::sin(*self)
    }
    fn cos(&self) -> f64 {
        f64::cos(*self)
    }
    fn exp(&self) -> f64 {
        f64::exp(*self)
    }
    fn ln(&self) -> f64 {
        f64::ln(*self)
    }
    fn sqrt(&self) -> f64 {
        f64::sqrt(*self)
    }
    fn inv(&self) -> f64 {
        1.0 / self
    }
    fn pw(&self, n: i32) -> f64 {
        self.powi(n)
    }
}

impl Num for Jet<f64> {
    fn k(&self, v: f64) -> Self {
        Jet::constant(v, self.point(), self.order())
    }
    fn sin(&self) -> Self {
        Jet::sin(self)
    }
    fn cos(&self) -> Self {
        Jet::cos(self)
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn ln(&self) -> Self {
        Jet::ln(self).unwrap()
    }
    fn sqrt(&self) -> Self {
        Jet::sqrt(self).unwrap()
    }
    fn inv(&self) -> Self {
        self.recip().unwrap()
    }
    fn pw(&self, n: i32) -> Self {
        self.powi(n).unwrap()
    }
}

pub fn f01<N: Num>(t: N, x: N, y: N) -> N {
    t * x * y
}
pub fn f02<N: Num>(t: N, x: N, y: N) -> N {
    (x.clone() + y.clone() * t.k(0.5)).sin() * t.exp()
}
pub fn f03<N: Num>(t: N, x: N, y: N) -> N {
    (x.pw(2) + y.pw(2) + t.k(1.0)).ln()
}
pub fn f04<N: Num>(t: N, x: N, y: N) -> N {
    (t.pw(2) + x.pw(2) + y.k(2.0)).sqrt() * y
}
pub fn f05<N: Num>(t: N, x: N, y: N) -> N {
    (t.k(3.0) + x.clone() * y.clone() - t).inv()
}
pub fn f06<N: Num>(t: N, x: N, y: N) -> N {
    (x * y.clone()).cos() - (t.clone() * y).sin() * t
}
pub fn f07<N: Num>(t: N, x: N, y: N) -> N {
    (x.clone() * t.k(-0.7) + y).exp().pw(3) * t.sin()
}
pub fn f08<N: Num>(t: N, x: N, y: N) -> N {
    x.pw(5) - y.pw(4) * t.pw(3) + t.k(2.0)
}
pub fn f09<N: Num>(t: N, x: N, y: N) -> N {
    (t.k(2.0) + x.sin()).ln() * (y.cos() + t.k(1.5)).inv()
}
pub fn f10<N: Num>(t: N, x: N, y: N) -> N {
    (t.clone() * t.k(0.3) + x.clone() * x).sin().sin() + y
}
pub fn f11<N: Num>(t: N, x: N, y: N) -> N {
    (t.pw(2) + t.k(1.0)).pw(-2) * (x - y).exp()
}
pub fn f12<N: Num>(t: N, x: N, y: N) -> N {
    (x.cos() * y.cos() + t.k(2.0)).sqrt().ln() * t
}
pub fn f13<N: Num>(t: N, x: N, y: N) -> N {
    (t.clone() * x.clone() * y.clone()).exp() - t * x * y
}
pub fn f14<N: Num>(t: N, x: N, y: N) -> N {
    (x.clone() + t.k(3.0)).inv() * (y.clone() + t.k(3.0)).inv() * (t + x + y).cos()
}
pub fn f15<N: Num>(t: N, x: N, y: N) -> N {
    (y.pw(2) * t.k(0.5) + x.pw(2) + t.k(0.2)).sqrt() * t.exp().cos()
}
pub fn f16<N: Num>(t: N, x: N, y: N) -> N {
    (x.sin() * y.sin() * t.sin() + t.k(1.0)).pw(3)
}
pub fn f17<N: Num>(t: N, x: N, y: N) -> N {
    (t.clone() - x.clone()).exp().inv() + (t + y).ln()
}
pub fn f18<N: Num>(t: N, x: N, y: N) -> N {
    x.clone() * x.exp() * y.cos() * t.pw(-1)
}
pub fn f19<N: Num>(t: N, x: N, y: N) -> N {
    ((x.clone() - y.clone()).pw(2) + t.clone() * t).exp().ln() + x * y
}
pub fn f20<N: Num>(t: N, x: N, y: N) -> N {
    (t.sqrt() * x.cos() + y.sin().exp()).pw(2)
}

pub fn jet_of(f: fn(Jet<f64>, Jet<f64>, Jet<f64>) -> Jet<f64>, p: [f64; 3]) -> Jet<f64> {
    f(Jet::seed(p, Var::T, ORDER), Jet::seed(p, Var::X, ORDER), Jet::seed(p, Var::Y, ORDER))
}

pub fn central(f: &dyn Fn([f64; 3]) -> f64, p: [f64; 3], a: MultiIndex, h: f64) -> f64 {
    let mut terms: Vec<([f64; 3], f64)> = vec![(p, 1.0)];
    for (vi, v) in [Var::T, Var::X, Var::Y].into_iter().enumerate() {
        let w: &[(f64, f64)] = match a.get(v) {
            0 => &[(0.0, 1.0)],
            1 => &[(1.0, 0.5), (-1.0, -0.5)],
            2 => &[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)],
            3 => &[(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)],
            _ => unreachable!("order above 3"),
        };
        let scale = h.powi(a.get(v) as i32);
        terms = terms
            .iter()
            .flat_map(|(q, c)| {
                w.iter().map(move |(o, wc)| {
                    let mut q = *q;
                    q[vi] += o * h;
                    (q, c * wc / scale)
                })
            })
            .collect();
    }
    terms.iter().map(|(q, c)| c * f(*q)).sum()
}

/// Two Richardson eliminations on h, h/2, h/4.
pub fn richardson(f: &dyn Fn([f64; 3]) -> f64, p: [f64; 3], a: MultiIndex, h: f64) -> f64 {
    let d = [central(f, p, a, h), central(f, p, a, h / 2.0), central(f, p, a, h / 4.0)];
    let e1 = (4.0 * d[1] - d[0]) / 3.0;
    let e2 = (4.0 * d[2] - d[1]) / 3.0;
    (16.0 * e2 - e1) / 15.0
}

macro_rules! forms_of {
    ($($f:ident),*) => {
        vec![$((stringify!($f), $f::<Jet<f64>> as fn(_, _, _) -> _, (|q: [f64; 3]| $f(q[0], q[1], q[2])) as fn([f64; 3]) -> f64)),*]
    };
}


pub type Form = (&'static str, fn(Jet<f64>, Jet<f64>, Jet<f64>) -> Jet<f64>, fn([f64; 3]) -> f64);

pub fn forms() -> Vec<Form> {
    forms_of!(f01, f02, f03, f04, f05, f06, f07, f08, f09, f10, f11, f12, f13, f14, f15, f16, f17, f18, f19, f20)
}

pub const POINTS: [[f64; 3]; 2] = [[0.7, 0.3, -0.4], [1.2, -0.5, 0.6]];
pub const STEP: f64 = 0.03;

/// Worst |jet − Richardson| / max(1, |Richardson|) over all forms, points
/// and multi-indices up to ORDER, with the place it occurs.
pub fn worst_jet_deviation() -> (f64, String) {
    let mut worst = (0.0, String::new());
    for (name, fj, ff) in forms() {
        for p in POINTS {
            let j = jet_of(fj, p);
            for &a in MultiIndex::all_up_to(ORDER) {
                let want = richardson(&ff, p, a, STEP);
                let d = (j.get(a) - want).abs() / want.abs().max(1.0);
                if !(d <= worst.0) {
                    worst = (d, format!("{name} {a} at {p:?}"));
                }
            }
        }
    }
    worst
}

pub const VARS: [Var; 3] = [Var::T, Var::X, Var::Y];

pub fn sample_slots() -> Slots {
    [("f".to_string(), SmoothFn::id().sin() + SmoothFn::constant(2.0))].into_iter().collect()
}

pub fn sample_exprs() -> Vec<Expr> {
    let (hx, hy, ht) = (Expr::h(0, 1, 0), Expr::h(0, 0, 1), Expr::h(1, 0, 0));
    let z = Expr::h(0, 2, 0) + Expr::h(0, 0, 2);
    vec![
        &hy * &z - &hx * Expr::h(0, 1, 1),
        (&hx * &ht).sin() + Expr::y() * &z,
        z.powi(3) / (Expr::h(0, 0, 0).powi(2) + 1.0),
        (Expr::t() * &hx).exp() * Expr::slot("f", Expr::t()),
        Expr::h(1, 1, 1) * Expr::x() - Expr::h(0, 2, 1).cos(),
    ]
}

/// Worst relative gap between D_v e evaluated on a germ and the matching
/// coefficient of e's own jet, over `germs` random order-6 germs.
pub fn worst_total_derivative_gap(germs: usize, seed: u64) -> f64 {
    let mut s = Sampler::new(seed);
    let sl = sample_slots();
    let mut worst = 0.0f64;
    let mut gap = |a: f64, b: f64| {
        let d = (a - b).abs() / (1.0 + a.abs().max(b.abs()));
        if !(d <= worst) {
            worst = d;
        }
    };
    for _ in 0..germs {
        let g = s.jet(6);
        for e in sample_exprs() {
            let full: Jet<f64> = e.eval_on(&g, &sl, 2).unwrap();
            for v in VARS {
                let d: Jet<f64> = e.total_derivative(v).eval_on(&g, &sl, 0).unwrap();
                gap(d.value(), full.get(MultiIndex::unit(v)));
            }
            let a = MultiIndex::new(0, 1, 1);
            let d2: Jet<f64> = e.total_derivative_multi(a).eval_on(&g, &sl, 0).unwrap();
            gap(d2.value(), full.get(a));
        }
    }
    worst
}
