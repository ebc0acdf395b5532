use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bendlab"))
}

fn desk() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("desk")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is json")
}

/// Copies the desk inputs into a temp dir and patches `pipeline.toml`.
fn desk_copy(patch: impl Fn(String) -> String) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(desk()).unwrap() {
        let p = entry.unwrap().path();
        if p.is_file() {
            std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
        }
    }
    let cfg = dir.path().join("pipeline.toml");
    let text = std::fs::read_to_string(&cfg).unwrap();
    std::fs::write(&cfg, patch(text)).unwrap();
    dir
}

fn pipeline(dir: &Path) -> Output {
    run(&["pipeline", "--config", dir.join("pipeline.toml").to_str().unwrap()])
}

#[test]
fn desk_pipeline_exit_zero() {
    let dir = desk_copy(|t| t);
    let out = pipeline(dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&std::fs::read(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report["checks"]["su_containment"], "pass");
    assert_eq!(report["hard_checks_passed"], true);
    assert_eq!(report["inputs"]["sha256"].as_object().unwrap().len(), 4);
}

#[test]
fn pipeline_reports_are_byte_identical() {
    let a = desk_copy(|t| t);
    let b = desk_copy(|t| t);
    assert_eq!(pipeline(a.path()).status.code(), Some(0));
    assert_eq!(pipeline(b.path()).status.code(), Some(0));
    for f in ["out/report.json", "out/rep.json"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn negative_alpha_is_a_config_error() {
    let dir = desk_copy(|t| t.replace("alphas = [1, 3]", "alphas = [1, -3]"));
    let out = pipeline(dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "InvalidForm");
    assert_eq!(err["exit_code"], 2);
    assert!(!dir.path().join("out/report.json").exists());
}

#[test]
fn square_discriminant_is_a_config_error() {
    let dir = desk_copy(|t| t.replace("unit_override = 3", "unit_override = 2"));
    let out = pipeline(dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "SquareDiscriminant");
}

#[test]
fn missing_input_file_is_a_config_error() {
    let dir = desk_copy(|t| t.replace("generators.json", "nowhere.json"));
    let out = pipeline(dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["stage"], "config");
}

#[test]
fn units_find_over_sqrt2() {
    let out = run(&["units", "find", "--field", desk().join("sqrt2.toml").to_str().unwrap(), "--threshold", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["u"], serde_json::json!(["17", "12"]));
    assert!(v["embeddings"][0]["approx"].as_f64().unwrap() > 10.0);
}

#[test]
fn units_find_over_q_fails() {
    let out = run(&["units", "find", "--field", desk().join("field.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "RankZeroField");
}

#[test]
fn forms_check_modes() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("a.json");
    std::fs::write(&m, "[[1,0,0],[0,2,1],[0,3,2]]").unwrap();
    let form = desk().join("instance.toml");
    for mode in ["so", "su"] {
        let out = run(&["forms", "check", "--form", form.to_str().unwrap(), "--matrix", m.to_str().unwrap(), "--mode", mode]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout_json(&out)["member"], true);
    }
    std::fs::write(&m, "[[1,0,0],[0,1,0],[0,0,2]]").unwrap();
    let out = run(&["forms", "check", "--form", form.to_str().unwrap(), "--matrix", m.to_str().unwrap(), "--mode", "so"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bend_run_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("rep.json");
    let inst = desk().join("instance.toml");
    let out = run(&["bend", "run", "--instance", inst.to_str().unwrap(), "--out", rep.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rels = desk().join("relators.toml");
    let out = run(&[
        "bend", "verify", "--rep", rep.to_str().unwrap(), "--form", inst.to_str().unwrap(), "--relators", rels.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["passed"], true);
    // b a b^-1 = a is not a relation of the bent group
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "relators = [\"b a b^-1 a^-1\"]\n").unwrap();
    let out = run(&["bend", "verify", "--rep", rep.to_str().unwrap(), "--form", inst.to_str().unwrap(), "--relators", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["relators"]["verdict"], "fail");
}

#[test]
fn projgeom_segment_distance() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("p.json");
    std::fs::write(&pts, r#"[[[0, 1], ["1/2", 1]]]"#).unwrap();
    let out = run(&["projgeom", "dist", "--domain", "segment", "--points", pts.to_str().unwrap(), "--precision", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let d = stdout_json(&out)["distances"][0]["approx"].as_f64().unwrap();
    assert!((d - 0.5 * 3f64.ln()).abs() < 1e-12);
}

#[test]
fn projgeom_emits_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("c.svg");
    let out = run(&["projgeom", "dist", "--domain", "omega0", "--emit-svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn projgeom_orbit() {
    let out = run(&["projgeom", "orbit", "--n", "3", "--point", "1,1,0,1"]);
    assert_eq!(stdout_json(&out)["open"], true);
    let out = run(&["projgeom", "orbit", "--n", "3", "--point", "1,1,0,0"]);
    assert_eq!(stdout_json(&out)["open"], false);
}

#[test]
fn certify_run_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("cert.json");
    let inst = desk().join("instance.toml");
    let out = run(&["certify", "run", "--instance", inst.to_str().unwrap(), "--word-cap", "6", "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&std::fs::read(report).unwrap()).unwrap();
    let certs = v["report"]["certificates"].as_array().unwrap();
    let verdict = |c: &str| certs.iter().find(|x| x["check"] == c).unwrap()["verdict"].clone();
    assert_eq!(verdict("proximality"), "pass");
    assert_eq!(verdict("burnside"), "pass");
    assert_eq!(verdict("invariant_form_symmetric"), "pass");
}

#[test]
fn selftest_filter_runs_only_metric_tests() {
    let out = run(&["selftest", "--filter", "hilbert"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().filter(|l| l.contains("criterion")).collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].contains("hilbert"));
}

#[test]
fn selftest_names_corrupted_golden() {
    let dir = tempfile::tempdir().unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("golden");
    for e in std::fs::read_dir(golden).unwrap() {
        let p = e.unwrap().path();
        std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    std::fs::write(dir.path().join("sl32_congruence.json"), "{}\n").unwrap();
    let out = run(&["selftest", "--filter", "congruence", "--golden", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.starts_with("[FAIL]") && l.contains("sl32_congruence.json")));
}
