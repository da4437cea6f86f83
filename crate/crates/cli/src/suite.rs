//! The verification suite behind `verify-all` and `report`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use geofol_core::check::{Sampler, Summary};
use geofol_core::conservation::{check_law, check_row, j4a_decomposition_check, printed_laws, random_slots, divergence, eval_residual, table2, LawId};
use geofol_core::exprs::Slots;
use geofol_core::foliation::{
    automorphic_check, cartan_audit, reduced_candidates, reduced_system_check, resolving_residuals, CartanAudit, ResolvingState,
};
use geofol_core::jet::SmoothFn;
use geofol_core::model::{beta0_identity_check, delta_commutator_check, invariant_representation_check, ModelParams, BASIS_GUARDS};
use geofol_core::numerics::fd::{run_fd, FdConfig, FdGrid};
use geofol_core::numerics::spectral::{run_spectral, Mode, SpectralConfig, SpectralInit, SpectralState};
use geofol_core::numerics::theta::{solve_theta, StepControl, ThetaParams, ThetaSolution};
use geofol_core::solutions::{verify_catalog, verify_expr, SolutionId, SolutionSpec};
use geofol_core::symmetry::{transform_solution, Generator, GroupAction};
use geofol_core::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub seed: u64,
    pub beta: f64,
    pub identity_tol: f64,
    pub table2_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            seed: 0,
            beta: 1.0,
            identity_tol: geofol_core::check::IDENTITY_TOL,
            table2_tol: geofol_core::check::TABLE2_TOL,
        }
    }
}

impl Settings {
    fn sampler(&self, stream: u64) -> Sampler {
        Sampler::new(self.seed.wrapping_mul(1_000_003).wrapping_add(stream))
    }

    /// β for checks that need β ≠ 0.
    fn beta_nonzero(&self) -> f64 {
        if self.beta != 0.0 {
            self.beta
        } else {
            1.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Reported but not counted toward the section result.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
    pub detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: Value) -> Self {
        Check {
            name: name.into(),
            pass,
            informational: false,
            detail,
        }
    }

    fn info(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub key: String,
    pub title: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Section {
    fn new(key: &str, title: &str, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass || c.informational);
        Section {
            key: key.into(),
            title: title.into(),
            pass,
            checks,
        }
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass && !c.informational).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub settings: Settings,
    pub pass: bool,
    pub sections: Vec<Section>,
}

fn judged(s: &Summary, tol: f64) -> bool {
    s.samples > 0 && s.max_normalized <= tol
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub const SOLUTION_DRAWS: usize = 5;
pub const SOLUTION_POINTS: usize = 100;

pub fn solutions(st: &Settings) -> Result<Section> {
    let reports = verify_catalog(st.beta, SOLUTION_DRAWS, SOLUTION_POINTS, st.seed)?;
    let checks = reports
        .iter()
        .map(|r| Check::new(r.id.clone(), judged(&r.summary, st.identity_tol), to_value(r)))
        .collect();
    Ok(Section::new("solutions", "Solution catalog", checks))
}

pub const LAW_DRAWS: usize = 4;
pub const LAW_GERMS: usize = 50;

pub fn law_beta(id: LawId, beta: f64) -> f64 {
    if id.beta0_only() {
        0.0
    } else {
        beta
    }
}

pub fn conservation(st: &Settings) -> Result<Section> {
    let mut s = st.sampler(2);
    let mut checks = Vec::new();
    for id in LawId::CATALOG {
        let r = check_law(id, law_beta(id, st.beta), LAW_DRAWS, LAW_GERMS, &mut s)?;
        checks.push(Check::new(id.name(), judged(&r.summary, st.identity_tol), to_value(&r)));
    }
    let r = check_law(LawId::J1Printed, st.beta, LAW_DRAWS, LAW_GERMS, &mut s)?;
    checks.push(Check::new(LawId::J1Printed.name(), judged(&r.summary, st.identity_tol), to_value(&r)).info());

    let germs = LAW_DRAWS * LAW_GERMS;
    let mut dec = Summary::new(st.identity_tol);
    let mut control = Summary::new(st.identity_tol);
    for _ in 0..germs {
        let j = s.jet(4);
        dec.push(j4a_decomposition_check(&j, st.beta, 0.5)?);
        control.push(j4a_decomposition_check(&j, st.beta, 1.0)?);
    }
    checks.push(Check::new("J4a decomposition", judged(&dec, st.identity_tol), to_value(&dec)));
    checks.push(Check::new(
        "J4a perturbed control fails",
        !judged(&control, st.identity_tol),
        to_value(&control),
    ));
    Ok(Section::new("conservation", "Conservation identities", checks))
}

pub const TABLE2_GERMS: usize = 100;

pub fn third_order(st: &Settings) -> Result<Section> {
    let mut s = st.sampler(3);
    let mut checks = Vec::new();
    for row in table2() {
        let mut r = check_row(&row, st.beta, TABLE2_GERMS, &mut s)?;
        r.pass = r.verbatim <= st.table2_tol;
        checks.push(Check::new(row.label(), r.pass, to_value(&r)));
    }
    for (name, q, rhs, slot_names) in printed_laws(st.beta) {
        let e = divergence(&q) - &rhs;
        let mut sum = Summary::new(st.table2_tol);
        for _ in 0..TABLE2_GERMS {
            let slots = random_slots(&slot_names, &mut s);
            sum.push(eval_residual(&e, &s.jet(5), &slots)?);
        }
        checks.push(Check::new(format!("printed {name}"), judged(&sum, st.table2_tol), to_value(&sum)));
    }
    Ok(Section::new("table2", "Third-order laws", checks))
}

pub const CARTAN_POINTS: u64 = 10;
pub const CARTAN_RANKS: [usize; 4] = [5, 9, 12, 14];

/// Cartan audit as emitted by the `cartan` command.
pub fn cartan_json(a: &CartanAudit) -> Value {
    json!({
        "ranks": a.ranks,
        "tau": a.taus,
        "sigma": a.characters,
        "Q": a.cartan_numbers[0],
        "Q1": a.cartan_numbers[1],
        "pass": a.pass,
    })
}

pub fn cartan(st: &Settings) -> Result<Section> {
    let beta = st.beta_nonzero();
    let mut checks = Vec::new();
    let mut first: Option<CartanAudit> = None;
    for k in 0..CARTAN_POINTS {
        let a = cartan_audit(beta, st.seed.wrapping_add(k))?;
        let ok = a.pass
            && a.ranks == CARTAN_RANKS
            && a.taus == [7, 3, 0]
            && a.characters == [4, 3]
            && a.cartan_numbers == [10, 10]
            && first.as_ref().is_none_or(|f| f == &a);
        checks.push(Check::new(format!("point {k}"), ok, cartan_json(&a)));
        first.get_or_insert(a);
    }
    Ok(Section::new("cartan", "Cartan audit", checks))
}

fn weights() -> Vec<SmoothFn> {
    vec![
        SmoothFn::id().exp(),
        SmoothFn::constant(-0.4),
        SmoothFn::id().powi(2) + SmoothFn::constant(1.0),
        SmoothFn::id().cos() + SmoothFn::constant(2.0),
    ]
}

pub const FOLIATION_POINTS: usize = 100;

pub fn resolving_check(st: &Settings, s: &mut Sampler) -> Result<Check> {
    let beta = st.beta;
    let (kappa, nu, rho) = (s.sign() * s.uniform(0.5, 1.5), s.uniform(-1.5, 1.5), s.uniform(0.5, 2.0));
    let state = ResolvingState::wave(kappa, nu, rho, beta);
    let hmax = 0.95 * (rho * kappa).abs();
    let mut sum = Summary::new(st.identity_tol);
    for _ in 0..FOLIATION_POINTS {
        let p = [s.uniform(0.0, 1.0), s.uniform(-1.0, 1.0), s.uniform(-hmax, hmax)];
        for r in resolving_residuals::<f64>(&state, beta, p)? {
            sum.push(r);
        }
    }
    let detail = json!({ "kappa": kappa, "nu": nu, "rho": rho, "summary": to_value(&sum) });
    Ok(Check::new("resolving (kappa,nu,rho) state", judged(&sum, st.identity_tol), detail))
}

pub fn trivial_check(st: &Settings, s: &mut Sampler) -> Result<Check> {
    let state = ResolvingState::trivial(s.uniform(-1.0, 1.0));
    let mut sum = Summary::new(st.identity_tol);
    for _ in 0..FOLIATION_POINTS {
        let h = if st.beta == 0.0 { s.uniform(-1.0, 1.0) } else { 0.0 };
        let p = [s.uniform(0.0, 1.0), s.uniform(-1.0, 1.0), h];
        for r in resolving_residuals::<f64>(&state, st.beta, p)? {
            sum.push(r);
        }
    }
    Ok(Check::new("resolving trivial state", judged(&sum, st.identity_tol), to_value(&sum)))
}

pub fn reduced_checks(st: &Settings, s: &mut Sampler, only: Option<&str>) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for c in reduced_candidates(st.beta, s) {
        if only.is_some_and(|o| o != c.candidate.subalgebra.name()) {
            continue;
        }
        let r = reduced_system_check(&c, st.beta, FOLIATION_POINTS, s)?;
        out.push(Check::new(
            format!("reduced {}", c.name),
            judged(&r.summary, st.identity_tol),
            to_value(&r),
        ));
    }
    if only.is_some() && out.is_empty() {
        return Err(Error::UnknownId(only.unwrap_or_default().to_string()));
    }
    Ok(out)
}

fn gaurvitz(beta: f64, mu: f64) -> Result<SolutionSpec> {
    let p: BTreeMap<String, f64> = [("rho", 1.0), ("kappa", 1.0), ("nu", 0.0), ("mu", mu)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    SolutionSpec::new(SolutionId::Gaurvitz, beta, p, Slots::new())
}

pub fn automorphic_checks(st: &Settings, s: &mut Sampler) -> Result<Vec<Check>> {
    let beta = st.beta;
    let state = ResolvingState::wave(1.0, 0.0, 1.0, beta);
    let g = gaurvitz(beta, s.uniform(-0.5, 0.5))?;
    let h = g.expr()?;
    let mut out = Vec::new();
    let (sum, rejected) = automorphic_check(&h, &g.slots, &state, true, FOLIATION_POINTS, s)?;
    let (f, _) = verify_expr::<f64>(&h, beta, &g.slots, FOLIATION_POINTS, s)?;
    out.push(Check::new(
        "automorphic gaurvitz",
        judged(&sum, st.identity_tol) && judged(&f, st.identity_tol),
        json!({ "params": g.params, "pairing": to_value(&sum), "rejected_points": rejected, "solves_F": to_value(&f) }),
    ));

    let mut slots = Slots::new();
    slots.insert("f".into(), SmoothFn::id().powi(2));
    slots.insert("g".into(), SmoothFn::constant(1.0));
    let eps = s.uniform(0.3, 1.0);
    let a = GroupAction::new(Generator::XInf, eps, slots.clone())?;
    let hb = transform_solution(&a, &h, beta)?;
    let mut all = slots.clone();
    all.extend(g.slots.clone());
    let (sum, rejected) = automorphic_check(&hb, &all, &state, true, FOLIATION_POINTS, s)?;
    let (f, _) = verify_expr::<f64>(&hb, beta, &all, FOLIATION_POINTS, s)?;
    out.push(Check::new(
        "automorphic Tinf-transformed gaurvitz",
        judged(&sum, st.identity_tol) && judged(&f, st.identity_tol),
        json!({ "epsilon": eps, "f": "(^ s 2)", "g": "1", "pairing": to_value(&sum), "rejected_points": rejected, "solves_F": to_value(&f) }),
    ));
    Ok(out)
}

pub const BASIS_GERMS: usize = 50;

pub fn basis_checks(st: &Settings, s: &mut Sampler) -> Result<Vec<Check>> {
    let beta = st.beta_nonzero();
    let tol = st.identity_tol;
    let mut rep = Summary::new(tol);
    let mut spread = 0.0f64;
    for _ in 0..BASIS_GERMS {
        let h = s.jet_avoiding(5, &BASIS_GUARDS);
        let mut first: Option<[f64; 3]> = None;
        for f in weights() {
            let r = invariant_representation_check(&h, &ModelParams::new(beta), &f)?;
            for x in [r.equation, r.b3, r.b4, r.b5] {
                rep.push(x);
            }
            match first {
                None => first = Some(r.values),
                Some(v) => {
                    for i in 0..3 {
                        spread = spread.max((v[i] - r.values[i]).abs() / (1.0 + v[i].abs()));
                    }
                }
            }
        }
    }
    let mut com = Summary::new(tol);
    let es = [
        geofol_core::exprs::Expr::h(0, 1, 0),
        geofol_core::exprs::Expr::h(0, 1, 1) * geofol_core::exprs::Expr::h(1, 0, 0),
        geofol_core::exprs::Expr::h(0, 0, 2).sin() + geofol_core::exprs::Expr::t(),
    ];
    for _ in 0..BASIS_GERMS {
        let h = s.jet(5);
        for f in weights() {
            for e in &es {
                for r in delta_commutator_check(&h, &f, e)? {
                    com.push(r);
                }
            }
        }
    }
    let mut b0 = Summary::new(tol);
    let (phi, psi) = (SmoothFn::id().exp(), SmoothFn::id().sin());
    let mut tries = 0;
    while b0.samples < BASIS_GERMS && tries < 4 * BASIS_GERMS {
        tries += 1;
        match beta0_identity_check(&s.jet(5), &phi, &psi) {
            Ok(r) => b0.push(r),
            Err(Error::DegenerateGerm(_)) | Err(Error::Domain(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(vec![
        Check::new(
            "invariant basis and f-independence",
            judged(&rep, tol) && spread <= tol,
            json!({ "beta": beta, "summary": to_value(&rep), "f_spread": spread }),
        ),
        Check::new("delta commutators", judged(&com, tol), to_value(&com)),
        Check::new("beta=0 representation", judged(&b0, tol) && b0.samples == BASIS_GERMS, to_value(&b0)),
    ])
}

pub fn foliation(st: &Settings) -> Result<Section> {
    let mut s = st.sampler(5);
    let mut checks = vec![resolving_check(st, &mut s)?, trivial_check(st, &mut s)?];
    checks.extend(reduced_checks(st, &mut s, None)?);
    checks.extend(automorphic_checks(st, &mut s)?);
    checks.extend(basis_checks(st, &mut s)?);
    Ok(Section::new("foliation", "Foliation and invariant basis", checks))
}

pub const LAMBDA_RANGE: (f64, f64) = (-400.0, 2000.0);
pub const LAMBDA_C_FIGURE: f64 = -150.0;

pub fn reference_theta(ctl: &StepControl) -> Result<ThetaSolution> {
    solve_theta(&ThetaParams::reference(), LAMBDA_RANGE.0, LAMBDA_RANGE.1, ctl)
}

/// Scenario (a): every row is a decreasing line.
pub fn scenario_a_check(g: &FdGrid) -> Check {
    let fits = g.row_fits();
    let worst_corr = fits.iter().map(|f| f.1).fold(-1.0, f64::max);
    let max_slope = fits.iter().map(|f| f.0).fold(f64::NEG_INFINITY, f64::max);
    let ok = g.truncated.is_none() && fits.iter().all(|&(sl, c)| sl < 0.0 && c <= -0.99);
    Check::new(
        "fd scenario (a) linear and decreasing",
        ok,
        json!({ "rows": g.v.len(), "worst_correlation": worst_corr, "max_slope": max_slope, "consistency": g.max_consistency(), "truncated": to_value(&g.truncated) }),
    )
}

/// Scenario (b): max|v| decreases over the run.
pub fn scenario_b_check(g: &FdGrid, lambda_c: f64) -> Check {
    let mx = g.max_abs();
    let monotone = mx.windows(2).all(|w| w[1] < w[0]);
    let lb = g.boundary_lambda();
    let near = ((lb - lambda_c) / lambda_c).abs() <= 0.1;
    Check::new(
        "fd scenario (b) max|v| decreasing",
        g.truncated.is_none() && monotone && near,
        json!({ "rows": g.v.len(), "max_abs_first": mx[0], "max_abs_last": mx[mx.len() - 1], "boundary_lambda": lb, "lambda_c": lambda_c, "consistency": g.max_consistency() }),
    )
}

pub const REFINE_STEPS: usize = 400;

pub fn theta_fd(_st: &Settings) -> Result<Section> {
    let ctl = StepControl::default();
    let th = reference_theta(&ctl)?;
    let fine = reference_theta(&ctl.refined())?;
    let mut checks = Vec::new();
    let lc = th.lambda_c.unwrap_or(f64::NAN);
    let lcf = fine.lambda_c.unwrap_or(f64::NAN);
    let rel = ((lc - lcf) / lc).abs();
    checks.push(Check::new(
        "theta singularity near -150",
        (lc - LAMBDA_C_FIGURE).abs() <= 0.2 * LAMBDA_C_FIGURE.abs() && rel < 0.01,
        json!({ "lambda_c": lc, "lambda_c_refined": lcf, "relative_change": rel, "halts": to_value(&th.halts), "nodes": th.nodes.len() }),
    ));
    let (res, at) = th.max_midpoint_residual()?;
    checks.push(Check::new(
        "theta midpoint residual",
        res <= 1e-6,
        json!({ "max_normalized": res, "at_lambda": at }),
    ));

    let a = run_fd(&th, &FdConfig::scenario_a())?;
    checks.push(scenario_a_check(&a));
    let b = run_fd(&th, &FdConfig::scenario_b())?;
    checks.push(scenario_b_check(&b, lc));

    let cfg = FdConfig {
        n: REFINE_STEPS,
        ..FdConfig::scenario_a()
    };
    let coarse = run_fd(&th, &cfg)?;
    let finer = run_fd(&th, &cfg.refined())?;
    let e = coarse.refinement_error(&finer);
    checks.push(Check::new(
        "fd grid refinement",
        e <= 1e-3 && coarse.truncated.is_none() && finer.truncated.is_none(),
        json!({ "steps": REFINE_STEPS, "relative_difference": e }),
    ));
    Ok(Section::new("theta_fd", "Theta pipeline and finite differences", checks))
}

/// A single gaurvitz mode with μ = 0.
pub fn rossby_init(beta: f64) -> Result<SpectralInit> {
    let p: BTreeMap<String, f64> = [("rho", 0.1), ("kappa", 1.0), ("nu", 1.0), ("mu", 0.0)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    SpectralInit::from_solution(&SolutionSpec::new(SolutionId::Gaurvitz, beta, p, Slots::new())?)
}

pub fn two_mode_init() -> SpectralInit {
    SpectralInit::Modes(vec![
        Mode::new(1.0, 1.0, 0.0),
        Mode {
            phase: 0.3,
            ..Mode::new(0.8, 1.0, 2.0)
        },
    ])
}

pub const DRIFT_DTS: [f64; 3] = [0.01, 0.005, 0.0025];

pub fn rossby_check(s: &SpectralState) -> Check {
    let e = s.final_l2_error().unwrap_or(f64::NAN);
    Check::new(
        "single-mode phase speed",
        e <= 1e-6,
        json!({ "n": s.n, "steps": s.steps, "time": s.time, "l2_error": e }),
    )
}

pub fn spectral(st: &Settings) -> Result<Section> {
    let beta = st.beta;
    let cfg = SpectralConfig {
        beta,
        ..Default::default()
    };
    let mut checks = vec![rossby_check(&run_spectral(&rossby_init(beta)?, &cfg)?)];
    let mut drifts = Vec::new();
    for dt in DRIFT_DTS {
        let s = run_spectral(&two_mode_init(), &SpectralConfig { dt, ..cfg })?;
        drifts.push(s.drift());
    }
    let worst = drifts.iter().fold(0.0f64, |a, d| a.max(d.0).max(d.1));
    let order_e = (drifts[1].0 / drifts[2].0).log2();
    let order_z = (drifts[1].1 / drifts[2].1).log2();
    checks.push(Check::new(
        "energy and enstrophy drift",
        worst <= 1e-6,
        json!({ "dt": DRIFT_DTS, "energy": drifts.iter().map(|d| d.0).collect::<Vec<_>>(), "enstrophy": drifts.iter().map(|d| d.1).collect::<Vec<_>>() }),
    ));
    let band = 3.5..=4.5;
    checks.push(Check::new(
        "drift scales as dt^4",
        band.contains(&order_e) && band.contains(&order_z),
        json!({ "energy_order": order_e, "enstrophy_order": order_z }),
    ));
    Ok(Section::new("spectral", "Spectral cross-validation", checks))
}

/// Every section of `verify-all`, in order.
pub fn run_all(st: &Settings) -> Result<SuiteReport> {
    let sections = vec![
        solutions(st)?,
        conservation(st)?,
        third_order(st)?,
        cartan(st)?,
        foliation(st)?,
        theta_fd(st)?,
        spectral(st)?,
    ];
    Ok(SuiteReport {
        settings: *st,
        pass: sections.iter().all(|s| s.pass),
        sections,
    })
}
