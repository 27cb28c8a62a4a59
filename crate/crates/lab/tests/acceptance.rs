//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use kreiss_core::bounds::{
    growth_fit, plancherel_check, remark_alpha_check, resolvent_to_cesaro_check,
    theorem_bound_check, GrowthModel, BOUND_SLACK,
};
use kreiss_core::operators::{build_diagonal, build_jordan, build_wave};
use kreiss_core::propagator::{expm_semigroup, semigroup_norm, trajectory};
use kreiss_core::{CMat, CVec, OperatorSystem, WaveTruncationParams};
use num_complex::Complex64;
use serde_json::Value;

const FIXTURES: [&str; 7] = [
    "scalar",
    "jordan2",
    "wave8",
    "diagonal_zero",
    "plancherel_fail",
    "singular_contour",
    "alpha_negative",
];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn unit(n: usize) -> CVec {
    CVec::from_element(n, c(1.0))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

fn scratch() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kreiss-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch directory");
    dir
}

fn run_cli(config: &Path, out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_kreiss-lab"))
        .arg("run")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env_remove(kreiss_lab::OUT_ENV)
        .output()
        .expect("spawn kreiss-lab")
        .status
        .code()
        .unwrap_or(-1)
}

fn plancherel_oracle() -> Result<Outcome, String> {
    let mut worst = 0.0f64;
    let mut pass = true;
    for (a, exact) in [(1.0, PI / 2.0), (0.0, PI)] {
        let sys = build_diagonal(&[c(a)]).map_err(|e| e.to_string())?;
        let e = plancherel_check(&sys, 1.0, &unit(1), 1e-4).map_err(|e| e.to_string())?;
        let errs = [rel(e.left[0], exact), rel(e.right[0], exact)];
        worst = worst.max(errs[0]).max(errs[1]);
        pass &= e.pass && errs.iter().all(|x| *x <= 1e-4);
    }
    Ok(Outcome::new(pass, format!("worst relative error {worst:.2e} (tol 1e-4)")))
}

fn max_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn closed_form_propagation() -> Result<Outcome, String> {
    let jordan = build_jordan(c(0.0), 2).map_err(|e| e.to_string())?;
    let norm = semigroup_norm(&jordan, 2.0).map_err(|e| e.to_string())?;
    let norm_err = (norm - (1.0 + 2f64.sqrt())).abs();

    let mut worst = 0.0f64;
    let mut checked = 0;
    for name in FIXTURES {
        let Ok(plan) = kreiss_lab::config::load(&fixture(name)).and_then(|c| c.plan()) else {
            continue;
        };
        for (s, t) in [(0.5, 1.5), (2.5, 0.75)] {
            let whole = expm_semigroup(&plan.system, s + t).map_err(|e| e.to_string())?;
            let split = expm_semigroup(&plan.system, s).map_err(|e| e.to_string())?
                * expm_semigroup(&plan.system, t).map_err(|e| e.to_string())?;
            worst = worst.max(max_entry(&(&whole - &split)) / max_entry(&whole).max(1.0));
        }
        checked += 1;
    }
    Ok(Outcome::new(
        norm_err <= 1e-8 && worst <= 1e-8,
        format!(
            "|T_2| error {norm_err:.1e} (tol 1e-8); semigroup residual {worst:.1e} over {checked} fixture systems (tol 1e-8)"
        ),
    ))
}

fn theorem_mechanism() -> Result<Outcome, String> {
    let ts = [4.0, 8.0, 16.0, 32.0, 64.0];
    let unitary: Vec<Complex64> = (-8..=8).map(|k| Complex64::new(0.0, k as f64)).collect();
    let wave = build_wave(WaveTruncationParams::new(4, 4).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?
        .shifted(0.5);
    let systems: [(&str, OperatorSystem); 3] = [
        ("A=0", build_diagonal(&[c(0.0)]).map_err(|e| e.to_string())?),
        ("diag(ik)", build_diagonal(&unitary).map_err(|e| e.to_string())?),
        ("wave4+1/2", wave),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, sys) in &systems {
        let out = theorem_bound_check(sys, 1.0, &ts).map_err(|e| e.to_string())?;
        pass &= out.entry.pass && out.entry.slack == BOUND_SLACK;
        parts.push(format!("{name} margin {:.4}", out.entry.worst_margin));
    }
    Ok(Outcome::new(pass, format!("{} (slack {BOUND_SLACK})", parts.join(", "))))
}

fn remark_verifier() -> Result<Outcome, String> {
    let jordan = build_jordan(c(0.0), 2).map_err(|e| e.to_string())?;
    let out = remark_alpha_check(&jordan, 2.0, &[4.0, 16.0, 64.0]).map_err(|e| e.to_string())?;
    let ts: Vec<f64> = (0..=120).map(|k| 4.0 + 0.5 * k as f64).collect();
    let samples = trajectory(&jordan, &ts, &[]).map_err(|e| e.to_string())?;
    let fit = growth_fit(&samples, GrowthModel::Power, None).map_err(|e| e.to_string())?;
    Ok(Outcome::new(
        out.entry.pass && (fit.a - 1.0).abs() <= 0.05,
        format!(
            "margin {:.4} (slack {}), fitted exponent {:.4} (target 1.00 +- 0.05)",
            out.entry.worst_margin, out.entry.slack, fit.a
        ),
    ))
}

fn resolvent_to_cesaro() -> Result<Outcome, String> {
    let sys = build_diagonal(&[c(1.0)]).map_err(|e| e.to_string())?;
    let ts = [2.0, 4.0, 8.0];
    let e = resolvent_to_cesaro_check(&sys, 1.0, &ts, &[unit(1)], 1e-8).map_err(|e| e.to_string())?;
    let mut worst_value = 0.0f64;
    let mut margins = Vec::new();
    for (k, &t) in ts.iter().enumerate() {
        let left = (1.0 - (-2.0 * t).exp()) / 2.0;
        let right = E * E / (2.0 * PI) * PI / (1.0 / t + 1.0);
        worst_value = worst_value.max(rel(e.left[k], left)).max(rel(e.right[k], right));
        margins.push(e.left[k] / e.right[k]);
    }
    let worst_margin = margins.iter().copied().fold(0.0, f64::max);
    Ok(Outcome::new(
        e.pass && worst_margin < 0.25 && worst_value <= 1e-6,
        format!(
            "margins {:.3}/{:.3}/{:.3} (< 0.25), analytic agreement {worst_value:.1e}",
            margins[0], margins[1], margins[2]
        ),
    ))
}

fn read_report(dir: &Path) -> Result<Vec<Value>, String> {
    let text = fs::read_to_string(dir.join("report.json")).map_err(|e| e.to_string())?;
    match serde_json::from_str(&text).map_err(|e| e.to_string())? {
        Value::Array(v) => Ok(v),
        _ => Err("report.json is not an array".into()),
    }
}

fn detail(entry: &Value, key: &str) -> Option<f64> {
    entry["details"][key].as_f64()
}

fn wave_demo(out: &Path) -> Result<Outcome, String> {
    let code = run_cli(&fixture("wave8"), out);
    let report = read_report(out)?;
    let find = |name: &str| report.iter().find(|e| e["check"] == name);
    let mut pass = code == 0;
    let mut parts = vec![format!("exit {code}")];
    for dir in ["forward", "backward"] {
        let strip = find(&format!("strip_kreiss[{dir}]")).ok_or("missing strip entry")?;
        let c_strip = detail(strip, "C_strip").unwrap_or(f64::INFINITY);
        let growth = find(&format!("growth_exponent[{dir}]")).ok_or("missing growth entry")?;
        let a = detail(growth, "power_a").unwrap_or(f64::INFINITY);
        let res_power = detail(growth, "power_rms_residual").unwrap_or(f64::NAN);
        let res_log = detail(growth, "power_log_rms_residual").unwrap_or(f64::NAN);
        pass &= c_strip.is_finite() && a <= 1.1;
        parts.push(format!(
            "{dir}: C_strip {c_strip:.4}, exponent {a:.3} (<= 1.1), rms power {res_power:.3} vs power-log {res_log:.3}"
        ));
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let Ok(entries) = fs::read_dir(&d) else { continue };
        for entry in entries.flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if let Ok(bytes) = fs::read(&path) {
                files.insert(path.strip_prefix(dir).unwrap_or(&path).to_path_buf(), bytes);
            }
        }
    }
    files
}

fn determinism(root: &Path, wave_first: &Path) -> Result<Outcome, String> {
    let mut compared = 0;
    let mut mismatched = Vec::new();
    for name in FIXTURES {
        let first = if name == "wave8" {
            wave_first.to_path_buf()
        } else {
            let dir = root.join(format!("{name}-a"));
            run_cli(&fixture(name), &dir);
            dir
        };
        let second = root.join(format!("{name}-b"));
        run_cli(&fixture(name), &second);
        let (a, b) = (snapshot(&first), snapshot(&second));
        compared += a.len();
        if a != b {
            mismatched.push(name);
        }
    }
    Ok(Outcome::new(
        mismatched.is_empty() && compared > 0,
        format!("{compared} artifact files compared across {} fixtures; mismatches: {mismatched:?}", FIXTURES.len()),
    ))
}

fn main() {
    let root = scratch();
    let wave_out = root.join("wave8-a");
    type Criterion<'a> = (&'a str, Duration, Box<dyn Fn() -> Result<Outcome, String> + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("scalar Plancherel oracle", Duration::from_secs(1), Box::new(plancherel_oracle)),
        ("closed-form propagation", Duration::from_secs(5), Box::new(closed_form_propagation)),
        ("dyadic Cesaro bound verifier", Duration::from_secs(120), Box::new(theorem_mechanism)),
        ("alpha > 1 bound verifier", Duration::from_secs(10), Box::new(remark_verifier)),
        ("resolvent-to-Cesaro step", Duration::from_secs(5), Box::new(resolvent_to_cesaro)),
        ("wave group desk-scale reproduction", Duration::from_secs(600), Box::new(|| wave_demo(&wave_out))),
        ("determinism of artifacts", Duration::from_secs(900), Box::new(|| determinism(&root, &wave_out))),
    ];

    let mut failures = 0;
    for (name, budget, check) in &criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {name}: {detail} [{:.2}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    let _ = fs::remove_dir_all(&root);
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
