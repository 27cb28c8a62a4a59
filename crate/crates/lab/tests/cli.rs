use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kreiss_lab::{exit, OUT_ENV};
use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

fn cli() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kreiss-lab"));
    cmd.env_remove(OUT_ENV);
    cmd
}

fn run(name: &str, out: &Path) -> Output {
    cli()
        .arg("run")
        .arg(fixture(name))
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn code(output: &Output) -> u8 {
    output.status.code().unwrap() as u8
}

fn json(path: &Path) -> Vec<Value> {
    serde_json::from_str::<Value>(&fs::read_to_string(path).unwrap())
        .unwrap()
        .as_array()
        .unwrap()
        .clone()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_owned()
}

#[test]
fn passing_fixtures_exit_zero() {
    for name in ["diagonal_zero", "scalar", "jordan2"] {
        let dir = TempDir::new().unwrap();
        let out = run(name, dir.path());
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert_eq!(code(&out), exit::PASS, "{name}: {stdout}");
        assert!(!stdout.contains("FAIL"), "{name}: {stdout}");
        assert!(stdout.contains("artifacts:"));
    }
}

#[test]
fn failed_verification_exits_one() {
    let dir = TempDir::new().unwrap();
    let out = run("plancherel_fail", dir.path());
    assert_eq!(code(&out), exit::VERIFICATION_FAILED);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL plancherel"));
    let report = json(&dir.path().join("report.json"));
    assert!(report.iter().any(|e| e["pass"] == false));
}

#[test]
fn config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let out = run("alpha_negative", dir.path());
    assert_eq!(code(&out), exit::CONFIG);

    let out = run("missing_operator", dir.path());
    assert_eq!(code(&out), exit::CONFIG);
    assert!(String::from_utf8_lossy(&out.stderr).contains("operator"));

    let out = cli().arg("run").arg(dir.path().join("absent.json")).output().unwrap();
    assert_eq!(code(&out), exit::CONFIG);
}

#[test]
fn singular_contour_exits_three_with_partial_report() {
    let dir = TempDir::new().unwrap();
    let out = run("singular_contour", dir.path());
    assert_eq!(code(&out), exit::NUMERICAL);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn describe_reports_dimensions() {
    let out = cli().arg("describe").arg(fixture("wave8")).output().unwrap();
    assert_eq!(code(&out), exit::PASS);
    assert!(String::from_utf8_lossy(&out.stdout).contains("dim: 578"));

    let out = cli().arg("describe").arg(fixture("diagonal_zero")).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("dim: 1"));

    let out = cli().arg("describe").arg(fixture("missing_operator")).output().unwrap();
    assert_eq!(code(&out), exit::CONFIG);
}

#[test]
fn output_directory_precedence() {
    let work = TempDir::new().unwrap();
    let config = work.path().join("exp.json");
    let mut value: Value =
        serde_json::from_str(&fs::read_to_string(fixture("diagonal_zero")).unwrap()).unwrap();
    value["output_dir"] = "from-config".into();
    fs::write(&config, value.to_string()).unwrap();

    let status = |cmd: &mut Command| code(&cmd.output().unwrap());

    assert_eq!(status(cli().arg("run").arg(&config)), exit::PASS);
    assert!(work.path().join("from-config/report.json").exists());

    let env_dir = work.path().join("from-env");
    assert_eq!(status(cli().arg("run").arg(&config).env(OUT_ENV, &env_dir)), exit::PASS);
    assert!(env_dir.join("report.json").exists());

    let flag_dir = work.path().join("from-flag");
    let mut cmd = cli();
    cmd.arg("run").arg(&config).arg("--out").arg(&flag_dir).env(OUT_ENV, &env_dir);
    fs::remove_dir_all(&env_dir).unwrap();
    assert_eq!(status(&mut cmd), exit::PASS);
    assert!(flag_dir.join("report.json").exists());
    assert!(!env_dir.exists());
}

#[test]
fn artifacts_have_documented_shape() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run("scalar", dir.path())), exit::PASS);
    let p = dir.path();

    assert_eq!(header(&p.join("resolvent.csv")), "re,im,sigma_min,norm");
    assert_eq!(header(&p.join("trajectory.csv")), "t,op_norm");
    assert_eq!(header(&p.join("cesaro.csv")), "t,lambda_max,C_primal_t,C_adjoint_t");
    let rows = fs::read_to_string(p.join("resolvent.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 25 * 81);

    let report = json(&p.join("report.json"));
    let checks: Vec<&str> = report.iter().map(|e| e["check"].as_str().unwrap()).collect();
    for expected in ["kreiss_constant", "theorem_bound", "plancherel", "resolvent_to_cesaro", "lemma1_l2_resolvent", "growth_exponent"] {
        assert!(checks.contains(&expected), "{checks:?}");
    }
    for entry in &report {
        for key in ["check", "inequality", "worst_margin", "slack", "pass", "details", "notes"] {
            assert!(entry.get(key).is_some(), "{key} missing in {entry}");
        }
    }

    let fits = json(&p.join("fit.json"));
    assert_eq!(fits.len(), 2);
    for fit in &fits {
        for key in ["series", "model", "c", "a", "omega", "rms_residual", "t_min", "t_max"] {
            assert!(fit.get(key).is_some(), "{key} missing in {fit}");
        }
    }
    assert!(fits.iter().all(|f| f["series"] == "growth"));
}
