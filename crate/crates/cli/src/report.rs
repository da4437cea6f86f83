//! Markdown summary of a suite run.

use std::fmt::Write;

use serde_json::Value;

use crate::suite::{Check, SuiteReport};

fn badge(pass: bool) -> &'static str {
    if pass {
        "![pass](https://img.shields.io/badge/result-pass-brightgreen)"
    } else {
        "![fail](https://img.shields.io/badge/result-fail-red)"
    }
}

/// The most telling number in a check's detail, if any.
fn headline(c: &Check) -> String {
    const KEYS: [&str; 10] = [
        "max_normalized",
        "verbatim",
        "l2_error",
        "lambda_c",
        "worst_correlation",
        "relative_difference",
        "energy_order",
        "max_abs_last",
        "Q",
        "f_spread",
    ];
    fn find<'a>(v: &'a Value, k: &str) -> Option<&'a Value> {
        match v {
            Value::Object(m) => m.get(k).or_else(|| m.values().find_map(|x| find(x, k))),
            _ => None,
        }
    }
    for k in KEYS {
        if let Some(v) = find(&c.detail, k) {
            return match v {
                Value::Number(n) => match n.as_f64() {
                    Some(x) if n.is_f64() => format!("{k} = {x:.3e}"),
                    _ => format!("{k} = {n}"),
                },
                other => format!("{k} = {other}"),
            };
        }
    }
    String::new()
}

const OPEN_QUESTIONS: [(&str, &str); 2] = [
    (
        "Multiplier convention for J4",
        "The density Φ(ζ+βy) is paired with the multiplier Φ′(ζ+βy).",
    ),
    (
        "Which finite-difference relation drives the march",
        "The default march advances the left boundary with relation 1 and fills each row with relation 2, keeping relation 1 at the interior nodes as a consistency diagnostic. Marching relation 1 at every node is available as `Relation1Interior`; on the reference data it leaves the tabulated range of θ after about fifty steps.",
    ),
];

pub fn markdown(r: &SuiteReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# geofol verification report\n");
    let _ = writeln!(
        s,
        "{} seed {}, beta {}, identity tolerance {:e}, table tolerance {:e}\n",
        badge(r.pass),
        r.settings.seed,
        r.settings.beta,
        r.settings.identity_tol,
        r.settings.table2_tol
    );
    let _ = writeln!(s, "| Section | Result | Passed |\n|---|---|---|");
    for sec in &r.sections {
        let counted: Vec<&Check> = sec.checks.iter().filter(|c| !c.informational).collect();
        let ok = counted.iter().filter(|c| c.pass).count();
        let _ = writeln!(s, "| {} | {} | {ok}/{} |", sec.title, badge(sec.pass), counted.len());
    }
    for sec in &r.sections {
        let _ = writeln!(s, "\n## {}\n\n| Check | Result | Detail |\n|---|---|---|", sec.title);
        for c in &sec.checks {
            let tag = if c.informational { " (informational)" } else { "" };
            let _ = writeln!(s, "| {}{tag} | {} | {} |", c.name, badge(c.pass), headline(c));
        }
    }
    let _ = writeln!(s, "\n## Open questions\n");
    for (q, a) in OPEN_QUESTIONS {
        let _ = writeln!(s, "- **{q}.** {a}");
    }
    s
}
