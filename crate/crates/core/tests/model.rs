use geofol_core::check::{Sampler, IDENTITY_TOL};
use geofol_core::error::Error;
use geofol_core::exprs::Expr;
use geofol_core::jet::SmoothFn;
use geofol_core::model::*;
use geofol_core::solutions::{sample_point, SolutionId, SolutionSpec};

fn weights() -> Vec<SmoothFn> {
    vec![
        SmoothFn::id().exp(),
        SmoothFn::constant(-0.4),
        SmoothFn::id().powi(2) + SmoothFn::constant(1.0),
        SmoothFn::id().cos() + SmoothFn::constant(2.0),
    ]
}

#[test]
fn representation_and_delta_formulas() {
    let mut s = Sampler::new(70);
    for beta in [1.0, -2.2] {
        for _ in 0..50 {
            let h = s.jet_avoiding(5, &BASIS_GUARDS);
            let mut first: Option<[f64; 3]> = None;
            for f in weights() {
                let r = invariant_representation_check(&h, &ModelParams::new(beta), &f).unwrap();
                assert!(r.passes(IDENTITY_TOL), "{r:?}");
                match first {
                    None => first = Some(r.values),
                    Some(v) => {
                        for i in 0..3 {
                            assert!((v[i] - r.values[i]).abs() <= IDENTITY_TOL * (1.0 + v[i].abs()));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn b3_is_hyy() {
    let mut s = Sampler::new(71);
    for _ in 0..50 {
        let h = s.jet_avoiding(5, &BASIS_GUARDS);
        let r = invariant_representation_check(&h, &ModelParams::new(1.0), &SmoothFn::constant(1.0)).unwrap();
        let hyy = h.get(geofol_core::jet::MultiIndex::new(0, 0, 2));
        assert!((r.values[0] - hyy).abs() <= 1e-9 * (1.0 + hyy.abs()));
    }
}

#[test]
fn basis_needs_nonzero_beta() {
    let h = Sampler::new(1).jet(5);
    let r = invariant_representation_check(&h, &ModelParams::new(0.0), &SmoothFn::constant(1.0));
    assert!(matches!(r, Err(Error::RegimeMismatch(_))));
}

#[test]
fn commutators_for_several_weights() {
    let mut s = Sampler::new(72);
    let es = [Expr::h(0, 1, 0), Expr::h(0, 1, 1) * Expr::h(1, 0, 0), Expr::h(0, 0, 2).sin() + Expr::t()];
    for _ in 0..50 {
        let h = s.jet(5);
        for f in weights() {
            for e in &es {
                for r in delta_commutator_check(&h, &f, e).unwrap() {
                    assert!(r.passes(IDENTITY_TOL), "{f} {e}: {r:?}");
                }
            }
        }
    }
}

#[test]
fn beta0_representation() {
    let mut s = Sampler::new(73);
    let phi = SmoothFn::id().exp();
    let psi = SmoothFn::id().sin();
    let mut used = 0;
    for _ in 0..200 {
        let h = s.jet(5);
        match beta0_identity_check(&h, &phi, &psi) {
            Ok(r) => {
                assert!(r.passes(IDENTITY_TOL), "{r:?}");
                used += 1;
            }
            Err(Error::DegenerateGerm(_)) | Err(Error::Domain(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(used >= 50);
    let spec = SolutionSpec::random(SolutionId::A22_2, 0.0, &mut s);
    let mut on_shell = 0;
    for _ in 0..200 {
        let p = sample_point(&mut s);
        let g = spec.germ::<f64>(p, 5).unwrap();
        if let Ok(r) = beta0_representation_check(&g, &phi, &psi) {
            assert!(r.passes(IDENTITY_TOL), "{r:?}");
            on_shell += 1;
        }
    }
    assert!(on_shell >= 20);
}

#[test]
fn catalog_solutions_have_zero_residual() {
    let mut s = Sampler::new(74);
    for id in [SolutionId::Gaurvitz, SolutionId::A3, SolutionId::A23_1a] {
        let spec = SolutionSpec::random(id, 1.0, &mut s);
        let g = spec.germ::<f64>(sample_point(&mut s), 3).unwrap();
        assert!(residual_f_scaled(&g, 1.0).unwrap().passes(IDENTITY_TOL));
    }
}
