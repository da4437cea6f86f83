mod common;

use common::{sample_exprs, sample_slots, worst_total_derivative_gap};
use geofol_core::check::Sampler;
use geofol_core::exprs::{EvalContext, Expr};
use geofol_core::jet::{Jet, SmoothFn, Var};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u8..3, 0u8..3, 0u8..3)
            .prop_filter("order ≤ 2", |(i, j, k)| i + j + k <= 2)
            .prop_map(|(i, j, k)| Expr::h(i, j, k)),
        Just(Expr::t()),
        Just(Expr::x()),
        Just(Expr::y()),
        (-2.0f64..2.0).prop_map(Expr::c),
        Just(Expr::slot("f", Expr::t())),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.powi(2)),
            inner.prop_map(|a| (a * 0.3).exp()),
        ]
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn total_derivative_matches_jet_extraction() {
    let gap = worst_total_derivative_gap(50, 50);
    assert!(gap <= 1e-10, "{gap:e}");
}

#[test]
fn concrete_function_agrees_with_composition() {
    let h = Expr::x().sin() * Expr::t().exp() + Expr::y().powi(3) * Expr::x();
    let sl = sample_slots();
    let p = [0.4, 0.1, -0.7];
    let g: Jet<f64> = h.evaluate(&EvalContext::at(p, &sl), 6).unwrap();
    for e in sample_exprs() {
        let composed = e.substitute(&|n| match n {
            geofol_core::exprs::Node::Field { index, .. } => Some(h.total_derivative_multi(*index)),
            _ => None,
        });
        let a: Jet<f64> = e.eval_on(&g, &sl, 0).unwrap();
        let b: Jet<f64> = composed.evaluate(&EvalContext::at(p, &sl), 0).unwrap();
        assert!(close(a.value(), b.value(), 1e-10), "{e}");
    }
}

#[test]
fn parse_errors_are_reported() {
    assert!(Expr::parse("(+ x").is_err());
    assert!(Expr::parse("(frobnicate x)").is_err());
    assert!(Expr::parse("x y").is_err());
}

proptest! {
    #[test]
    fn text_round_trip(e in expr()) {
        let text = e.to_prefix();
        let back = Expr::parse(&text).unwrap();
        prop_assert_eq!(back.to_prefix(), text);
    }

    #[test]
    fn total_derivatives_commute(e in expr(), seed in 0u64..1000) {
        let g = Sampler::new(seed).jet(6);
        let sl = sample_slots();
        let a = e.total_derivative(Var::X).total_derivative(Var::Y);
        let b = e.total_derivative(Var::Y).total_derivative(Var::X);
        let va: Jet<f64> = a.eval_on(&g, &sl, 0).unwrap();
        let vb: Jet<f64> = b.eval_on(&g, &sl, 0).unwrap();
        prop_assert!(close(va.value(), vb.value(), 1e-9));
    }

    #[test]
    fn derivative_is_linear(a in expr(), b in expr(), seed in 0u64..1000) {
        let g = Sampler::new(seed).jet(6);
        let sl = sample_slots();
        let lhs: Jet<f64> = (&a + &b).total_derivative(Var::T).eval_on(&g, &sl, 0).unwrap();
        let rhs: Jet<f64> = (a.total_derivative(Var::T) + b.total_derivative(Var::T)).eval_on(&g, &sl, 0).unwrap();
        prop_assert!(close(lhs.value(), rhs.value(), 1e-10));
    }
}

#[test]
fn documented_examples_parse() {
    let flux = Expr::parse("(+ (* (slot tau4 0 t) (+ H_xx H_yy) H_x) (* -1.0 (slot tau4 1 t) H_y))").unwrap();
    let z = Expr::h(0, 2, 0) + Expr::h(0, 0, 2);
    let want = Expr::slot("tau4", Expr::t()) * z * Expr::h(0, 1, 0) - Expr::slot_d("tau4", 1, Expr::t()) * Expr::h(0, 0, 1);
    let g = geofol_core::check::Sampler::new(3).jet(3);
    let sl: geofol_core::exprs::Slots = [("tau4".to_string(), SmoothFn::id().cos())].into_iter().collect();
    let a: Jet<f64> = flux.eval_on(&g, &sl, 0).unwrap();
    let b: Jet<f64> = want.eval_on(&g, &sl, 0).unwrap();
    assert!(close(a.value(), b.value(), 1e-14));
    for src in ["(+ 1 (^ s 2))", "(* 0.5 (sin (* 3 s)))", "(sin t)", "(- s 1 2)"] {
        assert!(SmoothFn::parse(src).is_ok(), "{src}");
    }
    assert_eq!(SmoothFn::parse("(- s 1 2)").unwrap().eval(5.0).unwrap(), 2.0);
}
