//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use geofol_cli::suite::{self, Section, Settings};

struct Outcome {
    pass: bool,
    detail: String,
}

fn sections(parts: Vec<Section>) -> Outcome {
    let mut failing = Vec::new();
    let mut total = 0;
    for s in &parts {
        for c in &s.checks {
            if c.informational {
                continue;
            }
            total += 1;
            if !c.pass {
                failing.push(format!("{}/{}", s.key, c.name));
            }
        }
    }
    let mut detail = format!("{}/{} checks", total - failing.len(), total);
    if !failing.is_empty() {
        detail.push_str(&format!("; failing: {}", failing.join(", ")));
    }
    Outcome {
        pass: failing.is_empty(),
        detail,
    }
}

fn at(beta: f64) -> Settings {
    Settings {
        beta,
        ..Settings::default()
    }
}

fn run_each(betas: &[f64], f: fn(&Settings) -> geofol_core::Result<Section>) -> Outcome {
    let mut parts = Vec::new();
    for &b in betas {
        match f(&at(b)) {
            Ok(mut s) => {
                s.key = format!("{}[beta={b}]", s.key);
                parts.push(s);
            }
            Err(e) => {
                return Outcome {
                    pass: false,
                    detail: format!("error at beta={b}: {e}"),
                }
            }
        }
    }
    sections(parts)
}

fn oracles() -> Outcome {
    let n = common::forms().len();
    let (jet, at) = common::worst_jet_deviation();
    let gap = common::worst_total_derivative_gap(50, 8);
    Outcome {
        pass: n == 20 && jet <= 1e-6 && gap <= 1e-10,
        detail: format!("{n} closed forms, worst jet vs Richardson {jet:.2e} ({at}); total derivative vs jet {gap:.2e} on 50 germs"),
    }
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("geofol-acceptance-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn read_dir(d: &PathBuf) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(d)
        .map(|it| {
            it.filter_map(|e| e.ok())
                .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap_or_default()))
                .collect()
        })
        .unwrap_or_default();
    out.sort();
    out
}

fn verify_all_twice() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_geofol");
    let mut runs = Vec::new();
    for tag in ["a", "b"] {
        let dir = scratch(tag);
        let o = Command::new(bin)
            .args(["verify-all", "--seed", "0", "--out"])
            .arg(&dir)
            .env_remove("GEOFOL_SEED")
            .output();
        match o {
            Ok(o) => runs.push((o.status.code(), o.stdout, read_dir(&dir))),
            Err(e) => {
                return Outcome {
                    pass: false,
                    detail: format!("could not run {bin}: {e}"),
                }
            }
        }
        let _ = std::fs::remove_dir_all(&dir);
    }
    let same = runs[0].1 == runs[1].1 && runs[0].2 == runs[1].2 && !runs[0].2.is_empty();
    let code = runs[0].0;
    Outcome {
        pass: same && code == Some(0) && runs[1].0 == Some(0),
        detail: format!(
            "exit codes {:?}/{:?}, outputs {} ({} artifact files)",
            runs[0].0,
            runs[1].0,
            if same { "byte-identical" } else { "differ" },
            runs[0].2.len()
        ),
    }
}

type Criterion = (u8, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "solution catalog", Duration::from_secs(30), || run_each(&[1.0, 0.0, -0.7], suite::solutions)),
        (2, "conservation identities", Duration::from_secs(30), || run_each(&[1.0, 0.0, -2.5], suite::conservation)),
        (3, "third-order laws", Duration::from_secs(60), || run_each(&[1.0], suite::third_order)),
        (4, "Cartan audit", Duration::from_secs(5), || run_each(&[1.0], suite::cartan)),
        (5, "foliation suite", Duration::from_secs(30), || run_each(&[1.0, 0.0], suite::foliation)),
        (6, "theta pipeline", Duration::from_secs(60), || run_each(&[1.0], suite::theta_fd)),
        (7, "spectral cross-validation", Duration::from_secs(120), || run_each(&[1.0], suite::spectral)),
        (8, "oracle equivalence", Duration::from_secs(60), oracles),
        (9, "verify-all exit code and determinism", Duration::from_secs(300), verify_all_twice),
    ];
    let mut all = true;
    for (n, name, budget, f) in criteria {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let pass = o.pass && took <= budget;
        all &= pass;
        println!(
            "criterion {n} {}: {name} ({}; {:.1} s of {} s)",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if !all {
        std::process::exit(1);
    }
}
