use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use modcurves::records::load_corpus;
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixtures() -> PathBuf {
    root().join("fixtures")
}

fn run(args: &[&str], fixtures_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modcurves"))
        .args(args)
        .arg("--fixtures")
        .arg(fixtures_dir)
        .env_remove("MODCURVES_FIXTURES")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn spec(name: &str) -> String {
    fixtures().join("specs").join(name).display().to_string()
}

fn package(name: &str) -> Value {
    let text = std::fs::read_to_string(fixtures().join("packages").join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn ingest_accepts_valid_package() {
    let path = fixtures().join("packages/89A.json");
    let out = run(&["ingest", path.to_str().unwrap()], &fixtures());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["files"][0]["label"], "89A");
}

#[test]
fn ingest_names_the_multiplicativity_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut pkg = package("89A.json");
    // a_6 = a_2 a_3 = 1; break it.
    pkg["coefficients"][5] = serde_json::json!(["5"]);
    let path = dir.path().join("89A.json");
    std::fs::write(&path, serde_json::to_string(&pkg).unwrap()).unwrap();
    let out = run(&["ingest", path.to_str().unwrap()], &fixtures());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("(m,n)=(2,3)"), "{}", stderr(&out));
}

#[test]
fn ingest_rejects_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, "").unwrap();
    let out = run(&["ingest", path.to_str().unwrap()], &fixtures());
    assert_ne!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("schema error"), "{}", stderr(&out));
}

#[test]
fn find_reproduces_level_243_quartic() {
    let out = run(&["find", &spec("243E.json"), "--deterministic"], &fixtures());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let stored = load_corpus().get("243E-worked").unwrap().polynomial.normalized().to_string();
    assert_eq!(v["polynomial"], stored.as_str());
    assert_eq!(v["pipeline"]["psi"]["c_f"], "1");
    assert_eq!(v["verdict"], "modular");
}

#[test]
fn find_degree_seven_on_178d() {
    let out = run(&["find", &spec("178D.json"), "--degree", "7"], &fixtures());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stored = load_corpus().get("178D-F7").unwrap().polynomial.normalized().to_string();
    assert_eq!(json(&out)["polynomial"], stored.as_str());
}

#[test]
fn find_refuses_non_constant_psi() {
    let out = run(&["find", &spec("120.json"), "--primes", "7,11"], &fixtures());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["pipeline"]["psi"]["status"], "non-constant");
    assert_eq!(v["verdict"], "refused");
    assert!(stderr(&out).contains("refused"));
}

#[test]
fn find_output_is_deterministic() {
    let args = ["find", "243E", "--deterministic", "--primes", "5,7,11"];
    let a = run(&args, &fixtures());
    let b = run(&args, &fixtures());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn missing_fixture_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["find", &spec("243E.json")], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[fixtures]"), "{}", stderr(&out));
}

#[test]
fn unknown_target_and_bad_group_are_input_errors() {
    let out = run(&["find", "no-such-record"], &fixtures());
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["find", "243E", "--group", "g7"], &fixtures());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_group_changes_the_bound() {
    let out = run(&["find", "243E", "--group", "custom:324", "--primes", "5"], &fixtures());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["pipeline"]["relation_bound"]["bound"], 216);
}

#[test]
fn klein_quartic_counts_are_consistent() {
    let out = run(&["count-points", "49A14"], &fixtures());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let counts = json(&out)["counts"].as_array().unwrap().clone();
    assert_eq!(counts.len(), 15);
    for c in &counts {
        if c["p"] == 7 {
            assert!(c["expected"].is_null());
        } else if c["p"] != 2 {
            assert_eq!(c["consistent"], true, "{c}");
        }
    }
}

#[test]
fn count_points_refuses_singular_curves() {
    let out = run(&["count-points", "X^2*Y*Z + X*Y^2*Z + X*Y*Z^2"], &fixtures());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not smooth"));
}

#[test]
fn classify_matches_stored_markers() {
    for (key, kind) in [("49A14", "flex"), ("243E", "flex"), ("57ABC", "ordinary-point")] {
        let out = run(&["classify", key], &fixtures());
        assert_eq!(out.status.code(), Some(0), "{key}: {}", stderr(&out));
        let v = json(&out);
        assert_eq!(v["marker_matches"], true, "{key}");
        assert_eq!(v["flex"]["kind"], kind, "{key}");
    }
}

#[test]
fn reproduce_table_with_one_row_of_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixtures().join("packages/243E.json"), dir.path().join("243E.json")).unwrap();
    let out = run(&["reproduce-table", "--deterministic"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("verified 1/44, skipped 43"), "{}", stderr(&out));
}

#[test]
fn reproduce_table_flags_corrupted_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixtures().join("packages/243E.json"), dir.path().join("243E.json")).unwrap();
    let text = std::fs::read_to_string(root().join("crates/core/data/corpus.json")).unwrap();
    let mut corpus: Value = serde_json::from_str(&text).unwrap();
    let row = corpus["records"].as_array_mut().unwrap().iter_mut().find(|r| r["id"] == "243E").unwrap();
    let c = row["polynomial"][0][3].as_i64().unwrap();
    row["polynomial"][0][3] = (c + 1).into();
    let path = dir.path().join("corpus.json");
    std::fs::write(&path, serde_json::to_string(&corpus).unwrap()).unwrap();
    let out = run(&["reproduce-table", "--corpus", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("mismatched 1"), "{}", stderr(&out));
}

#[test]
fn fixture_directory_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_modcurves"))
        .args(["basis", "243E", "--terms", "5"])
        .env("MODCURVES_FIXTURES", fixtures())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["h"][0], serde_json::json!(["1", "0", "0", "0", "-3"]));
}

#[test]
fn verify_reports_records() {
    let out = run(&["verify", "178C-89A", "--deterministic", "--format", "text"], &fixtures());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Verified"));
}
