use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn geofol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geofol"))
        .args(args)
        .env_remove("GEOFOL_SEED")
        .output()
        .unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("geofol-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn gaurvitz_with_random_parameters_passes() {
    let o = geofol(&["verify-solution", "--id", "gaurvitz"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["result"], "PASS");
    assert!(v["max_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn j5_needs_beta_zero() {
    let o = geofol(&["verify-claw", "--id", "J5_0", "--beta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "RegimeMismatch");
    let o = geofol(&["verify-claw", "--id", "J5_0", "--beta", "0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn cartan_numbers() {
    let o = geofol(&["cartan"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for needle in [r#""Q":10"#, r#""Q1":10"#, r#""pass":true"#] {
        assert!(text.contains(needle), "{text}");
    }
}

#[test]
fn failing_law_exits_one() {
    let o = geofol(&["verify-claw", "--id", "J1_printed", "--beta", "1", "--random-jets", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["result"], "FAIL");
}

#[test]
fn bad_input_is_reported_as_json() {
    for args in [
        vec!["verify-solution", "--id", "a99"],
        vec!["verify-solution", "--id", "gaurvitz", "--params", r#"{"lambda": 0.3, "kappa": 1, "nu": 1, "mu": 0}"#],
        vec!["verify-solution", "--id", "gaurvitz", "--params", r#"{"zz": 1}"#],
        vec!["verify-solution", "--id", "a3", "--slot", "tau1=(sin"],
        vec!["claw-generate", "--base", "J2", "--symmetry", "X0_3"],
        vec!["foliation", "--check", "reduced", "--subalgebra", "Y7"],
        vec!["nonsense"],
        vec!["cartan", "--beta", "0"],
    ] {
        let o = geofol(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let e = stderr_json(&o);
        assert!(e["error"].is_string() && e["message"].is_string(), "{args:?}");
    }
}

#[test]
fn params_override_and_derive() {
    let o = geofol(&["verify-solution", "--id", "gaurvitz", "--params", r#"{"kappa": 2, "nu": 1, "mu": 0.5}"#, "--beta", "-1.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let lambda = v["params"]["lambda"].as_f64().unwrap();
    assert!((lambda - (1.5 / 5.0 - 0.5)).abs() < 1e-15);
}

#[test]
fn config_file_is_validated() {
    let d = scratch("config");
    let bad = d.join("bad.json");
    std::fs::write(&bad, r#"{"schema": 1, "seeds": 3}"#).unwrap();
    let o = geofol(&["--config", bad.to_str().unwrap(), "cartan"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "ConfigError");

    let old = d.join("old.json");
    std::fs::write(&old, r#"{"schema": 0}"#).unwrap();
    assert_eq!(geofol(&["--config", old.to_str().unwrap(), "list"]).status.code(), Some(2));

    let good = d.join("good.json");
    std::fs::write(&good, r#"{"schema": 1, "seed": 5, "beta": 0.5}"#).unwrap();
    let a = geofol(&["--config", good.to_str().unwrap(), "verify-solution", "--id", "a3"]);
    let b = geofol(&["verify-solution", "--id", "a3", "--seed", "5", "--beta", "0.5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_geofol"));
        c.args(["verify-solution", "--id", "a11_2"]).args(extra).env_remove("GEOFOL_SEED");
        if let Some(s) = env {
            c.env("GEOFOL_SEED", s);
        }
        c.output().unwrap()
    };
    assert_eq!(run(Some("9"), &[]).stdout, run(None, &["--seed", "9"]).stdout);
    assert_ne!(run(Some("9"), &[]).stdout, run(None, &[]).stdout);
    assert_eq!(run(Some("9"), &["--seed", "1"]).stdout, run(None, &["--seed", "1"]).stdout);
    assert_eq!(run(Some("x"), &[]).status.code(), Some(2));
}

#[test]
fn list_covers_the_catalog() {
    let v = stdout_json(&geofol(&["list"]));
    assert_eq!(v["solutions"].as_array().unwrap().len(), 16);
    assert_eq!(v["table2"].as_array().unwrap().len(), 30);
    assert!(v["laws"].as_array().unwrap().iter().any(|l| l["id"] == "J4a"));
}

#[test]
fn generated_law_identity_and_table_row() {
    let o = geofol(&["claw-generate", "--base", "J3", "--symmetry", "X3", "--check-table2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["table2"]["status"], "verbatim");
    assert_eq!(v["densities"].as_array().unwrap().len(), 3);

    let o = geofol(&["claw-generate", "--base", "J4", "--symmetry", "X1", "--check-table2"]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["identity"]["pass"], true);
    assert_eq!(v["table2"]["status"], "sign-flipped");
}

#[test]
fn foliation_checks() {
    for check in ["resolving", "automorphic", "basis"] {
        let o = geofol(&["foliation", "--check", check]);
        assert_eq!(o.status.code(), Some(0), "{check}");
    }
    let o = geofol(&["foliation", "--check", "reduced", "--subalgebra", "Y1Y3"]);
    assert_eq!(o.status.code(), Some(0));
    let o = geofol(&["foliation", "--check", "reduced", "--subalgebra", "Y3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerics_write_their_csv() {
    let d = scratch("numerics");
    let out = d.to_str().unwrap();
    for (cmd, file, header) in [
        (vec!["theta"], "theta.csv", "lambda,theta,dtheta"),
        (vec!["fd", "--scenario", "a"], "v.csv", "t,x,v"),
        (vec!["rossby"], "diag.csv", "time,energy,enstrophy,l2_error_vs_exact"),
    ] {
        let mut args = vec!["--out", out];
        args.extend(cmd.iter().copied());
        let o = geofol(&args);
        assert_eq!(o.status.code(), Some(0), "{cmd:?}: {}", String::from_utf8_lossy(&o.stderr));
        let text = std::fs::read_to_string(d.join(file)).unwrap();
        assert_eq!(text.lines().next(), Some(header));
        let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert!(first.iter().all(|f| f.contains('e')), "{first:?}");
    }
    let o = geofol(&["--out", out, "fd", "--scenario", "a", "--march", "relation1-interior"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stdout_json(&o)["check"]["detail"]["truncated"].is_null());
}

#[test]
fn spectral_rejects_non_periodic_config() {
    let d = scratch("spectral");
    let cfg = d.join("c.json");
    std::fs::write(&cfg, r#"{"schema": 1, "spectral": {"modes": [{"rho": 0.1, "kappa": 1.5, "nu": 1}]}}"#).unwrap();
    let o = geofol(&["--config", cfg.to_str().unwrap(), "--out", d.to_str().unwrap(), "rossby"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "NonPeriodicInit");
}

#[test]
fn report_from_saved_run() {
    let d = scratch("report");
    let out = d.to_str().unwrap();
    let o = geofol(&["--out", out, "verify-all", "--seed", "2"]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("verify-all seed=2"));
    let r = geofol(&["report", "--input", d.join("verify-all.json").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    let md = String::from_utf8(r.stdout).unwrap();
    assert!(md.starts_with("# geofol verification report"));
    assert!(md.contains("## Open questions"));
    assert!(md.contains("Multiplier convention for J4"));
    assert!(md.contains("finite-difference relation"));
    let missing = geofol(&["report", "--input", d.join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}
