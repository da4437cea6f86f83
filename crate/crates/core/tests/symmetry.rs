use geofol_core::check::{Sampler, IDENTITY_TOL};
use geofol_core::exprs::{EvalContext, Expr, Slots};
use geofol_core::jet::{Jet, SmoothFn};
use geofol_core::model::f_expr;
use geofol_core::solutions::{random_smooth, sample_point, verify_expr, SolutionId, SolutionSpec};
use geofol_core::symmetry::{characteristic, frechet_apply, merged_slots, transform_solution, GroupAction, Generator};

fn gen_slots(g: Generator, s: &mut Sampler) -> Slots {
    g.slot_names().iter().map(|n| (n.to_string(), random_smooth(s))).collect()
}

fn value(e: &Expr, p: [f64; 3], slots: &Slots) -> f64 {
    let j: Jet<f64> = e.evaluate(&EvalContext::at(p, slots), 0).unwrap();
    j.value()
}

#[test]
fn actions_map_solutions_to_solutions() {
    let mut s = Sampler::new(7);
    for g in Generator::ALL {
        let beta = if g.beta0_only() { 0.0 } else { 1.0 };
        for id in [SolutionId::Gaurvitz, SolutionId::A3, SolutionId::A22_2, SolutionId::A11_3] {
            let sol = SolutionSpec::random(id, beta, &mut s);
            let act = GroupAction::new(g, s.uniform(-0.5, 0.5), gen_slots(g, &mut s)).unwrap();
            let hb = transform_solution(&act, &sol.expr().unwrap(), beta).unwrap();
            let slots = merged_slots(&sol.slots, &act.slots).unwrap();
            let (sum, _) = verify_expr::<f64>(&hb, beta, &slots, 100, &mut s).unwrap();
            assert!(sum.pass, "{g} on {id}: {sum:?}");
        }
    }
}

#[test]
fn x3_on_a3() {
    let mut s = Sampler::new(8);
    let sol = SolutionSpec::random(SolutionId::A3, 1.0, &mut s);
    let act = GroupAction::new(Generator::X3, 0.3, Slots::new()).unwrap();
    let hb = transform_solution(&act, &sol.expr().unwrap(), 1.0).unwrap();
    let (sum, _) = verify_expr::<f64>(&hb, 1.0, &sol.slots, 100, &mut s).unwrap();
    assert!(sum.pass);
}

#[test]
fn xinf_t_squared_on_gaurvitz() {
    let mut s = Sampler::new(9);
    let sol = SolutionSpec::random(SolutionId::Gaurvitz, 1.0, &mut s);
    let mut slots = Slots::new();
    slots.insert("f".into(), SmoothFn::id().powi(2));
    slots.insert("g".into(), SmoothFn::constant(0.0));
    let act = GroupAction::new(Generator::XInf, 1.0, slots.clone()).unwrap();
    let hb = transform_solution(&act, &sol.expr().unwrap(), 1.0).unwrap();
    let (sum, _) = verify_expr::<f64>(&hb, 1.0, &slots, 100, &mut s).unwrap();
    assert!(sum.pass, "{sum:?}");
}

#[test]
fn one_parameter_group_law() {
    let mut s = Sampler::new(10);
    let h = Expr::x().powi(2) * Expr::y().sin() + (Expr::t() * Expr::y()).exp() + Expr::x() * Expr::t();
    for g in Generator::ALL {
        let slots = gen_slots(g, &mut s);
        let (e1, e2) = (s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5));
        let a = |e| GroupAction::new(g, e, slots.clone()).unwrap();
        let twice = transform_solution(&a(e2), &transform_solution(&a(e1), &h, 0.0).unwrap(), 0.0).unwrap();
        let once = transform_solution(&a(e1 + e2), &h, 0.0).unwrap();
        for _ in 0..20 {
            let p = sample_point(&mut s);
            let (u, v) = (value(&twice, p, &slots), value(&once, p, &slots));
            assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()), "{g}: {u} vs {v}");
        }
    }
}

#[test]
fn epsilon_derivative_is_characteristic() {
    let mut s = Sampler::new(11);
    let h = Expr::x().powi(2) * Expr::y().sin() + (Expr::t() * Expr::y()).exp() + Expr::x() * Expr::t().cos();
    for g in Generator::ALL {
        let slots = gen_slots(g, &mut s);
        let chi = characteristic(g, &slots).unwrap();
        let at = |e: f64| transform_solution(&GroupAction::new(g, e, slots.clone()).unwrap(), &h, 0.0).unwrap();
        let (hp, hm, hp2, hm2) = (at(1e-3), at(-1e-3), at(2e-3), at(-2e-3));
        for _ in 0..10 {
            let p = sample_point(&mut s);
            let d1 = (value(&hp, p, &slots) - value(&hm, p, &slots)) / 2e-3;
            let d2 = (value(&hp2, p, &slots) - value(&hm2, p, &slots)) / 4e-3;
            let fd = (4.0 * d1 - d2) / 3.0;
            let germ: Jet<f64> = h.evaluate(&EvalContext::at(p, &slots), 1).unwrap();
            let eta: Jet<f64> = chi.eta.eval_on(&germ, &slots, 0).unwrap();
            assert!((fd - eta.value()).abs() < 1e-8 * (1.0 + fd.abs()), "{g}: {fd} vs {}", eta.value());
        }
    }
}

#[test]
fn linearized_symmetry_on_gaurvitz() {
    let mut s = Sampler::new(12);
    let f = f_expr(1.0);
    for g in [Generator::X1, Generator::X2, Generator::X3, Generator::XInf] {
        let slots = gen_slots(g, &mut s);
        let chi = characteristic(g, &slots).unwrap();
        let lin = frechet_apply(&chi, &f, 3).unwrap();
        let sol = SolutionSpec::random(SolutionId::Gaurvitz, 1.0, &mut s);
        for _ in 0..20 {
            let p = sample_point(&mut s);
            let germ: Jet<f64> = sol.germ(p, 5).unwrap();
            let (v, scale) = lin.eval_scaled(&EvalContext::new(std::slice::from_ref(&germ), &slots)).unwrap();
            assert!(v.abs() <= IDENTITY_TOL * (1.0 + scale), "{g}: {v}");
        }
    }
}
