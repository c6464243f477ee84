use std::fs;
use std::path::Path;

use assert_cmd::Command;
use serde_json::Value;

use oscquant::fixtures::{write_fixture, Fixture, FixtureCase};

fn oscquant() -> Command {
    Command::cargo_bin("oscquant").unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = oscquant().args(args).assert().success().get_output().stdout.clone();
    serde_json::from_slice(&out).unwrap()
}

fn write_reference_fixtures(dir: &Path) {
    for case in FixtureCase::ALL {
        write_fixture(&dir.join(case.file_name()), &Fixture::reference(case), "test copy").unwrap();
    }
}

#[test]
fn classify_small_grid() {
    let out = oscquant()
        .args(["classify", "--gamma", "-2:2", "--lambda", "-2:2", "--steps", "5"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma,lambda,f,det_sign,neg_count,case_label"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.contains(&"0,0,1,positive,0,Interior"));
    assert!(rows.contains(&"1,1,-2,negative,1,Case1"));
}

#[test]
fn classify_rejects_malformed_range() {
    oscquant().args(["classify", "--gamma", "-2..2"]).assert().code(2);
    oscquant().args(["classify", "--steps", "1"]).assert().code(2);
}

#[test]
fn sequential_and_parallel_sweeps_match() {
    let run = |extra: &[&str]| {
        let mut args = vec!["classify", "--steps", "21"];
        args.extend_from_slice(extra);
        oscquant().args(&args).assert().success().get_output().stdout.clone()
    };
    assert_eq!(run(&[]), run(&["--sequential"]));
}

#[test]
fn quantize_case1_fixture() {
    let v = json(&["quantize", "--fixture", "case1"]);
    assert_eq!(v["pipelineBranch"], "bopp");
    assert!(v["bopp"].is_object());
    let mx = &v["decoupled"]["modeX"];
    assert!((mx["qCoeff"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!((mx["pCoeff"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let levels = v["spectrumSample"].as_array().unwrap();
    assert_eq!(levels.len(), 16);
    assert!(levels.iter().all(|e| e["regime"] == "real" && e["im"] == 0.0));
}

#[test]
fn quantize_case2_fixture() {
    let v = json(&["quantize", "--fixture", "case2"]);
    assert_eq!(v["pipelineBranch"], "relabel");
    assert!(v["relabel"].is_array());
    assert_eq!(v["decoupled"]["relativeSign"], -1);
    for e in v["spectrumSample"].as_array().unwrap() {
        assert_eq!(e["regime"], "complex");
        let m = e["m"].as_f64().unwrap();
        assert!((e["im"].as_f64().unwrap().abs() - (m + 0.5)).abs() < 1e-12);
    }
}

#[test]
fn quantize_origin_reports_table() {
    let v = json(&["quantize", "--gamma", "0", "--lambda", "0"]);
    assert!(v["commutatorTable"].is_array());
    assert!(["bopp", "relabel", "unsupported"].contains(&v["pipelineBranch"].as_str().unwrap()));
}

#[test]
fn quantize_accepts_negative_parameters() {
    let v = json(&["quantize", "--gamma", "-1.5", "--lambda", "1"]);
    assert_eq!(v["pipelineBranch"], "unsupported");
    assert!(v["note"].as_str().unwrap().contains("ansatz inadmissible"));
}

#[test]
fn json_is_deterministic_with_full_digits() {
    let a = oscquant()
        .args(["quantize", "--fixture", "case2"])
        .output()
        .unwrap()
        .stdout;
    let b = oscquant()
        .args(["quantize", "--fixture", "case2"])
        .output()
        .unwrap()
        .stdout;
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("\"trace\": 7.0000000000000000e0"));
    let params_at = text.find("\"params\"").unwrap();
    let sample_at = text.find("\"spectrumSample\"").unwrap();
    assert!(params_at < sample_at);
}

#[test]
fn quantize_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    oscquant()
        .args(["quantize", "--fixture", "case1", "--out", out.to_str().unwrap()])
        .assert()
        .success();
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["pipelineBranch"], "bopp");
}

#[test]
fn spectrum_table_and_state() {
    let v = json(&["spectrum", "--fixture", "case1", "--n-max", "2", "--m-max", "3"]);
    let levels = v.as_array().unwrap();
    assert_eq!(levels.len(), 6);
    let want = ((1.0f64 / 3.0).sqrt() + (8.0f64 / 3.0).sqrt()) / 2.0;
    assert!((levels[0]["re"].as_f64().unwrap() - want).abs() < 1e-12);
    let keys: Vec<&String> = levels[0].as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 5);

    let s = json(&["spectrum", "--fixture", "case2", "--state", "0,2"]);
    assert_eq!(s["xi"]["classTag"], "normalizable");
    assert_eq!(s["eta"]["classTag"], "tempered");
    assert_eq!(s["eta"]["polyCoeffs"].as_array().unwrap().len(), 3);
    assert_eq!(s["level"]["regime"], "complex");
}

#[test]
fn simulate_lee_conserves_p_lambda() {
    let out = oscquant()
        .args([
            "simulate", "--gamma", "1", "--lambda", "1", "--T", "100", "--stride", "1000",
        ])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y,xdot,ydot,p_lambda"));
    let p: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(p.len(), 101);
    assert!(p.iter().all(|v| (v - p[0]).abs() < 1e-10));
}

#[test]
fn simulate_bateman_and_generalized() {
    oscquant()
        .args(["simulate", "--system", "bateman", "--gamma", "0.1", "--T", "10"])
        .assert()
        .success();
    oscquant()
        .args([
            "simulate",
            "--system",
            "generalized",
            "--a",
            "0.5",
            "--b",
            "0.5",
            "--T",
            "1",
        ])
        .assert()
        .code(2)
        .stderr(predicates_str("degenerate mass matrix"));
}

#[test]
fn simulate_blow_up_exit_code() {
    oscquant()
        .args(["simulate", "--gamma", "0", "--lambda", "3", "--T", "100"])
        .assert()
        .code(3)
        .stderr(predicates_str("blow-up at t"));
}

#[test]
fn simulate_bad_grid_is_usage_error() {
    oscquant().args(["simulate", "--dt", "2", "--T", "1"]).assert().code(2);
    oscquant().args(["simulate", "--dt", "0"]).assert().code(2);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    oscquant().arg("frobnicate").assert().code(2);
}

#[test]
fn verify_passes_on_shipped_fixtures() {
    oscquant()
        .arg("verify")
        .assert()
        .success()
        .stdout(predicates_str("0 failed"));
}

#[test]
fn verify_json_lists_checks() {
    let v = json(&["verify", "--json"]);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() > 20);
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn verify_fails_on_perturbed_fixture() {
    let dir = tempfile::tempdir().unwrap();
    write_reference_fixtures(dir.path());
    let mut f = Fixture::reference(FixtureCase::Case2);
    f.s[(1, 2)] += 1e-3;
    write_fixture(&dir.path().join("case2.txt"), &f, "perturbed").unwrap();
    oscquant()
        .args(["verify", "--fixtures", dir.path().to_str().unwrap()])
        .assert()
        .code(1)
        .stdout(predicates_str("FAIL  case2: S orthogonal"));
}

#[test]
fn verify_reports_missing_fixture_path() {
    let dir = tempfile::tempdir().unwrap();
    write_reference_fixtures(dir.path());
    fs::remove_file(dir.path().join("case1.txt")).unwrap();
    let missing = dir.path().join("case1.txt");
    oscquant()
        .args(["verify", "--fixtures", dir.path().to_str().unwrap()])
        .assert()
        .code(2)
        .stderr(predicates_str(missing.to_str().unwrap()));
}

#[test]
fn quantize_missing_fixture_path() {
    oscquant()
        .args(["quantize", "--fixture", "/no/such/fixture.txt"])
        .assert()
        .code(2)
        .stderr(predicates_str("/no/such/fixture.txt"));
}

fn predicates_str(needle: &str) -> impl predicates::Predicate<str> {
    predicates::str::contains(needle.to_string())
}
