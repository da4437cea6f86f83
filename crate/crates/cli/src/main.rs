use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use geofol_core::check::{Sampler, Summary};
use geofol_core::conservation::{
    check_law, eval_residual, generated_identity, check_row, law, random_slots, table2, LawId, Table2Row,
};
use geofol_core::exprs::Slots;
use geofol_core::foliation::cartan_audit;
use geofol_core::jet::SmoothFn;
use geofol_core::numerics::fd::{run_fd, FdConfig, FdMarch};
use geofol_core::numerics::spectral::{run_spectral, SpectralInit};
use geofol_core::numerics::theta::{solve_theta, StepControl};
use geofol_core::solutions::{catalog, verify, SolutionId, SolutionSpec};
use geofol_core::symmetry::Generator;

use geofol_cli::config::RunConfig;
use geofol_cli::suite::{self, Check, SuiteReport};
use geofol_cli::{report, CliError, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};

#[derive(Parser)]
#[command(name = "geofol", version, about = "Verification and numerics for the barotropic geopotential forecast equation")]
struct Cli {
    /// JSON run configuration (`"schema": 1`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV and JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FoliationCheck {
    Resolving,
    Automorphic,
    Reduced,
    Basis,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    A,
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum March {
    BoundaryFill,
    Relation1Interior,
}

#[derive(Subcommand)]
enum Cmd {
    /// Catalog of solutions, conservation laws and generators.
    List,
    /// Residual check of one catalog solution.
    VerifySolution {
        #[arg(long)]
        id: String,
        /// Parameter overrides as a JSON object, e.g. '{"kappa": 2}'.
        #[arg(long)]
        params: Option<String>,
        /// Slot function override, `name=expr` in prefix notation.
        #[arg(long = "slot")]
        slots: Vec<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
    },
    /// Divergence identity of one conservation law on random germs.
    VerifyClaw {
        #[arg(long)]
        id: String,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, default_value_t = 200)]
        random_jets: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Applies a symmetry to a conservation law.
    ClawGenerate {
        #[arg(long)]
        base: String,
        #[arg(long)]
        symmetry: String,
        /// Also compare with the tabulated right-hand side.
        #[arg(long)]
        check_table2: bool,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 100)]
        germs: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Resolving system, automorphic pairing, reduced systems or invariant basis.
    Foliation {
        #[arg(long, value_enum)]
        check: FoliationCheck,
        /// Restrict `reduced` to one subalgebra, e.g. Y1Y2.
        #[arg(long)]
        subalgebra: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Cartan involutivity audit of the resolving system.
    Cartan {
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Integrates θ(λ) and writes theta.csv.
    Theta,
    /// Finite-difference march for v(x, t); writes v.csv.
    Fd {
        #[arg(long, value_enum, default_value = "a")]
        scenario: Scenario,
        #[arg(long, value_enum, default_value = "boundary-fill")]
        march: March,
        /// Write every n-th time row.
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Pseudo-spectral run; writes diag.csv.
    Rossby,
    /// Full suite; exit 0 iff every check passes.
    VerifyAll {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
    },
    /// Markdown report of a suite run.
    Report {
        /// A verify-all.json written by `verify-all --out`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
    },
}

struct Ctx {
    cfg: RunConfig,
    out: Option<PathBuf>,
}

impl Ctx {
    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    fn write(&self, dir: &Path, name: &str, body: &str) -> Result<String, CliError> {
        std::fs::create_dir_all(dir)?;
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        Ok(p.display().to_string())
    }
}

fn emit(v: &Value, pass: bool) -> i32 {
    println!("{v}");
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn result(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn summary_json(s: &Summary) -> Value {
    serde_json::to_value(s).unwrap_or(Value::Null)
}

fn list() -> i32 {
    let laws: Vec<Value> = LawId::ALL
        .iter()
        .map(|l| json!({ "id": l.name(), "regime": if l.beta0_only() { "beta=0" } else { "any" }, "slots": l.slot_names(), "catalog": LawId::CATALOG.contains(l) }))
        .collect();
    let gens: Vec<Value> = Generator::ALL
        .iter()
        .map(|g| json!({ "id": g.name(), "regime": if g.beta0_only() { "beta=0" } else { "any" }, "slots": g.slot_names() }))
        .collect();
    let rows: Vec<String> = table2().iter().map(Table2Row::label).collect();
    emit(&json!({ "solutions": catalog(), "laws": laws, "generators": gens, "table2": rows }), true)
}

fn parse_slots(id: SolutionId, raw: &[String]) -> Result<Slots, CliError> {
    let (_, names, _) = id.info();
    let mut out = Slots::new();
    for r in raw {
        let (k, v) = r
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--slot expects name=expr, got {r:?}")))?;
        if !names.contains(&k) {
            return Err(CliError::Usage(format!("{id} has no slot `{k}` (slots: {names:?})")));
        }
        out.insert(k.to_string(), SmoothFn::parse(v)?);
    }
    Ok(out)
}

fn verify_solution(
    ctx: &Ctx,
    id: &str,
    params: Option<&str>,
    slots: &[String],
    samples: Option<usize>,
    seed: Option<u64>,
    beta: Option<f64>,
) -> Result<i32, CliError> {
    let id: SolutionId = id.parse()?;
    let seed = ctx.cfg.seed(seed)?;
    let beta = ctx.cfg.beta(beta);
    let samples = samples.or(ctx.cfg.samples).unwrap_or(suite::SOLUTION_POINTS);
    if samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let mut s = Sampler::new(seed);
    let base = SolutionSpec::random(id, beta, &mut s);
    let mut p = base.params.clone();
    let mut sl = base.slots.clone();
    if let Some(text) = params {
        let user: BTreeMap<String, f64> =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("--params: {e}")))?;
        let (names, _, _) = id.info();
        if let Some(k) = user.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(CliError::Usage(format!("{id} has no parameter `{k}` (parameters: {names:?})")));
        }
        for d in id.derived_params() {
            if !user.contains_key(*d) {
                p.remove(*d);
            }
        }
        p.extend(user);
    }
    sl.extend(parse_slots(id, slots)?);
    let spec = SolutionSpec::new(id, beta, p, sl)?;
    let r = verify(&spec, samples, seed.wrapping_add(1))?;
    let slot_text: BTreeMap<&String, String> = spec.slots.iter().map(|(k, v)| (k, v.to_string())).collect();
    let tol = ctx.cfg.settings(Some(seed), Some(beta))?.identity_tol;
    let pass = r.summary.samples > 0 && r.summary.max_normalized <= tol;
    Ok(emit(
        &json!({
            "id": r.id,
            "result": result(pass),
            "beta": beta,
            "params": spec.params,
            "slots": slot_text,
            "points": r.points,
            "rejected_points": r.rejected_points,
            "max_residual": r.summary.max_residual,
            "max_normalized": r.summary.max_normalized,
            "tolerance": tol,
        }),
        pass,
    ))
}

fn verify_claw(ctx: &Ctx, id: &str, beta: f64, jets: usize, seed: Option<u64>) -> Result<i32, CliError> {
    let id: LawId = id.parse()?;
    if jets == 0 {
        return Err(CliError::Usage("--random-jets must be positive".into()));
    }
    let mut s = Sampler::new(ctx.cfg.seed(seed)?);
    let draws = suite::LAW_DRAWS.min(jets);
    let per = jets.div_ceil(draws);
    let r = check_law(id, beta, draws, per, &mut s)?;
    let tol = ctx.cfg.settings(None, Some(beta))?.identity_tol;
    let pass = r.summary.samples > 0 && r.summary.max_normalized <= tol;
    Ok(emit(
        &json!({ "id": r.law, "result": result(pass), "beta": beta, "regime": r.regime, "summary": summary_json(&r.summary) }),
        pass,
    ))
}

fn claw_generate(
    ctx: &Ctx,
    base: &str,
    symmetry: &str,
    check_table2: bool,
    beta: Option<f64>,
    germs: usize,
    seed: Option<u64>,
) -> Result<i32, CliError> {
    let id: LawId = base.parse()?;
    let gen: Generator = symmetry.parse()?;
    let beta = ctx.cfg.beta(beta);
    if germs == 0 {
        return Err(CliError::Usage("--germs must be positive".into()));
    }
    gen.check_regime(beta)?;
    let cl = law(id, beta)?;
    let mut s = Sampler::new(ctx.cfg.seed(seed)?);
    let (densities, identity) = generated_identity(&cl, gen)?;
    let mut names: Vec<&str> = id.slot_names().to_vec();
    names.extend_from_slice(gen.slot_names());
    let mut sum = Summary::new(ctx.cfg.settings(None, None)?.table2_tol);
    for _ in 0..germs {
        let slots = random_slots(&names, &mut s);
        sum.push(eval_residual(&identity, &s.jet(5), &slots)?);
    }
    let mut pass = sum.pass;
    let mut out = json!({
        "base": id.name(),
        "symmetry": gen.name(),
        "beta": beta,
        "densities": densities.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "identity": summary_json(&sum),
    });
    if check_table2 {
        let row = table2()
            .into_iter()
            .find(|r| r.law == id && r.generator == gen)
            .ok_or_else(|| CliError::Usage(format!("no table row for {id}:{gen}")))?;
        let tol = ctx.cfg.settings(None, None)?.table2_tol;
        let mut r = check_row(&row, beta, germs, &mut s)?;
        r.pass = r.verbatim <= tol;
        pass = pass && r.pass;
        out["table2"] = serde_json::to_value(&r).unwrap_or(Value::Null);
    }
    out["result"] = json!(result(pass));
    Ok(emit(&out, pass))
}

fn checks_json(checks: &[Check]) -> (Value, bool) {
    let pass = checks.iter().all(|c| c.pass || c.informational);
    (json!({ "result": result(pass), "checks": checks }), pass)
}

fn foliation(ctx: &Ctx, check: FoliationCheck, sub: Option<&str>, beta: Option<f64>, seed: Option<u64>) -> Result<i32, CliError> {
    let st = ctx.cfg.settings(seed, beta)?;
    if sub.is_some() && !matches!(check, FoliationCheck::Reduced) {
        return Err(CliError::Usage("--subalgebra applies to --check reduced".into()));
    }
    let mut s = Sampler::new(st.seed);
    let checks = match check {
        FoliationCheck::Resolving => vec![suite::resolving_check(&st, &mut s)?, suite::trivial_check(&st, &mut s)?],
        FoliationCheck::Automorphic => suite::automorphic_checks(&st, &mut s)?,
        FoliationCheck::Reduced => suite::reduced_checks(&st, &mut s, sub)?,
        FoliationCheck::Basis => suite::basis_checks(&st, &mut s)?,
    };
    let (v, pass) = checks_json(&checks);
    Ok(emit(&v, pass))
}

fn cartan(ctx: &Ctx, beta: Option<f64>, seed: Option<u64>) -> Result<i32, CliError> {
    let beta = ctx.cfg.beta(beta);
    if beta == 0.0 {
        return Err(geofol_core::Error::RegimeMismatch("the Cartan audit is set up for beta != 0".into()).into());
    }
    let a = cartan_audit(beta, ctx.cfg.seed(seed)?)?;
    Ok(emit(&suite::cartan_json(&a), a.pass))
}

fn theta(ctx: &Ctx) -> Result<i32, CliError> {
    let p = ctx.cfg.theta_params();
    let (lo, hi) = ctx.cfg.lambda_range();
    let th = solve_theta(&p, lo, hi, &StepControl::default())?;
    let (res, at) = th.max_midpoint_residual()?;
    let file = ctx.write(&ctx.out_dir(), "theta.csv", &th.to_csv())?;
    let pass = res <= 1e-6;
    Ok(emit(
        &json!({
            "result": result(pass),
            "params": p,
            "lambda_range": [lo, hi],
            "lambda_c": th.lambda_c,
            "halts": th.halts,
            "nodes": th.nodes.len(),
            "max_midpoint_residual": res,
            "at_lambda": at,
            "csv": file,
        }),
        pass,
    ))
}

fn fd(ctx: &Ctx, scenario: Scenario, march: March, stride: Option<usize>) -> Result<i32, CliError> {
    let th = solve_theta(&ctx.cfg.theta_params(), ctx.cfg.lambda_range().0, ctx.cfg.lambda_range().1, &StepControl::default())?;
    let base = match scenario {
        Scenario::A => FdConfig::scenario_a(),
        Scenario::B => FdConfig::scenario_b(),
    };
    let cfg = FdConfig {
        march: match march {
            March::BoundaryFill => FdMarch::BoundaryFill,
            March::Relation1Interior => FdMarch::Relation1Interior,
        },
        ..ctx.cfg.fd_config(base)
    };
    let g = run_fd(&th, &cfg)?;
    let stride = stride.or(ctx.cfg.fd.stride).unwrap_or(40);
    let file = ctx.write(&ctx.out_dir(), "v.csv", &g.to_csv(stride))?;
    let check = match scenario {
        Scenario::A => suite::scenario_a_check(&g),
        Scenario::B => suite::scenario_b_check(&g, th.lambda_c.unwrap_or(f64::NAN)),
    };
    Ok(emit(
        &json!({ "result": result(check.pass), "config": cfg, "check": check, "csv": file }),
        check.pass,
    ))
}

fn rossby(ctx: &Ctx) -> Result<i32, CliError> {
    let cfg = ctx.cfg.spectral_config();
    let init = match ctx.cfg.spectral_modes() {
        Some(ms) => SpectralInit::Modes(ms),
        None => suite::rossby_init(cfg.beta)?,
    };
    let st = run_spectral(&init, &cfg)?;
    let file = ctx.write(&ctx.out_dir(), "diag.csv", &st.diag_csv())?;
    let (de, dz) = st.drift();
    let l2 = st.final_l2_error();
    let pass = de <= 1e-6 && dz <= 1e-6 && l2.is_none_or(|e| e <= 1e-6);
    Ok(emit(
        &json!({
            "result": result(pass),
            "config": cfg,
            "steps": st.steps,
            "l2_error": l2,
            "energy_drift": de,
            "enstrophy_drift": dz,
            "csv": file,
        }),
        pass,
    ))
}

fn suite_lines(r: &SuiteReport) -> String {
    let mut s = String::new();
    for sec in &r.sections {
        for c in &sec.checks {
            let tag = if c.informational { " (informational)" } else { "" };
            s.push_str(&format!("{} {}/{}{tag}\n", result(c.pass), sec.key, c.name));
        }
    }
    let failing: usize = r.sections.iter().map(|x| x.failures().len()).sum();
    s.push_str(&format!("verify-all seed={} beta={}: {} ({failing} failing)\n", r.settings.seed, r.settings.beta, result(r.pass)));
    s
}

/// Writes the suite artifacts: the JSON report and the numerics CSVs.
fn write_artifacts(ctx: &Ctx, dir: &Path, r: &SuiteReport) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(r).map_err(|e| CliError::Config(e.to_string()))?;
    ctx.write(dir, "verify-all.json", &(json + "\n"))?;
    let th = suite::reference_theta(&StepControl::default())?;
    ctx.write(dir, "theta.csv", &th.to_csv())?;
    ctx.write(dir, "v_a.csv", &run_fd(&th, &FdConfig::scenario_a())?.to_csv(40))?;
    ctx.write(dir, "v_b.csv", &run_fd(&th, &FdConfig::scenario_b())?.to_csv(80))?;
    let cfg = ctx.cfg.spectral_config();
    ctx.write(dir, "diag.csv", &run_spectral(&suite::rossby_init(cfg.beta)?, &cfg)?.diag_csv())?;
    Ok(())
}

fn verify_all(ctx: &Ctx, seed: Option<u64>, beta: Option<f64>) -> Result<i32, CliError> {
    let st = ctx.cfg.settings(seed, beta)?;
    let r = suite::run_all(&st)?;
    if let Some(dir) = &ctx.out {
        write_artifacts(ctx, dir, &r)?;
    }
    print!("{}", suite_lines(&r));
    Ok(if r.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn report_cmd(ctx: &Ctx, input: Option<&Path>, seed: Option<u64>, beta: Option<f64>) -> Result<i32, CliError> {
    let r: SuiteReport = match input {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
        }
        None => suite::run_all(&ctx.cfg.settings(seed, beta)?)?,
    };
    let md = report::markdown(&r);
    if let Some(dir) = &ctx.out {
        ctx.write(dir, "report.md", &md)?;
    }
    print!("{md}");
    Ok(EXIT_PASS)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig {
            schema: geofol_cli::config::SCHEMA,
            ..Default::default()
        },
    };
    let out = cfg.output(cli.out.as_deref());
    let ctx = Ctx { cfg, out };
    match cli.cmd {
        Cmd::List => Ok(list()),
        Cmd::VerifySolution {
            id,
            params,
            slots,
            samples,
            seed,
            beta,
        } => verify_solution(&ctx, &id, params.as_deref(), &slots, samples, seed, beta),
        Cmd::VerifyClaw { id, beta, random_jets, seed } => verify_claw(&ctx, &id, beta, random_jets, seed),
        Cmd::ClawGenerate {
            base,
            symmetry,
            check_table2,
            beta,
            germs,
            seed,
        } => claw_generate(&ctx, &base, &symmetry, check_table2, beta, germs, seed),
        Cmd::Foliation {
            check,
            subalgebra,
            beta,
            seed,
        } => foliation(&ctx, check, subalgebra.as_deref(), beta, seed),
        Cmd::Cartan { beta, seed } => cartan(&ctx, beta, seed),
        Cmd::Theta => theta(&ctx),
        Cmd::Fd { scenario, march, stride } => fd(&ctx, scenario, march, stride),
        Cmd::Rossby => rossby(&ctx),
        Cmd::VerifyAll { seed, beta } => verify_all(&ctx, seed, beta),
        Cmd::Report { input, seed, beta } => report_cmd(&ctx, input.as_deref(), seed, beta),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
