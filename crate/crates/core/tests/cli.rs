//! End-to-end runs of the binary: exit codes, report contents, determinism,
//! CSV output and the suite runner.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hardy-lab"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).expect("utf8 report"))
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, text) = run(args);
    (code, serde_json::from_str(&text).expect("report is json"))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// The bundled fuzz scenario cut down to a few trials.
fn small_fuzz(dir: &Path) -> PathBuf {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(scenario("fuzz.json")).unwrap()).unwrap();
    v["task"]["params"]["trials"] = Value::from(4);
    let path = dir.join("fuzz.json");
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    path
}

#[test]
fn constant_reports_hardy_value() {
    let (code, r) = report(&["constant", path_str(&scenario("hardy-p2.json")), "--no-timestamp"]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "pass");
    assert_eq!(r["result"]["kind"], "A");
    assert_eq!(r["result"]["value"], 2.0);
    assert_eq!(r["result"]["method"], "closed-form");
    assert!(r.get("timestamp").is_none());
    assert_eq!(r["resolved"]["mode"], "lebesgue");
}

#[test]
fn timestamp_present_by_default() {
    let (_, r) = report(&["constant", path_str(&scenario("hardy-p2.json"))]);
    assert!(r["timestamp"].as_u64().is_some());
}

#[test]
fn divergence_exits_two() {
    let (code, r) = report(&["constant", path_str(&scenario("divergent.json")), "--no-timestamp"]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "divergent");
    assert_eq!(r["result"]["divergent"], true);
}

#[test]
fn failed_assertion_exits_one_with_replay_data() {
    let (code, r) = report(&["check-conditions", path_str(&scenario("morrey-unbalanced.json")), "--no-timestamp"]);
    assert_eq!(code, 1);
    assert_eq!(r["exit_code"], 1);
    assert!(r["seed"].is_u64());
    assert_eq!(r["resolved"]["mode"], "morrey");
    let failed: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["morrey-necessity"]);
}

#[test]
fn input_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"meta": {"name": "x"}, "bogus": 1}"#).unwrap();
    let (code, r) = report(&["constant", path_str(&bad)]);
    assert_eq!(code, 3);
    assert!(r["error"].as_str().unwrap().contains("bogus"));

    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["constant", path_str(&missing)]).0, 3);

    let mut text = std::fs::read_to_string(scenario("hardy-p2.json")).unwrap();
    text = text.replace("\"t1\"", "\"t1 +\"");
    let syntax = dir.path().join("syntax.json");
    std::fs::write(&syntax, text).unwrap();
    assert_eq!(run(&["constant", path_str(&syntax)]).0, 3);

    assert_eq!(run(&["frobnicate"]).0, 3);
    assert_eq!(run(&["constant"]).0, 3);
}

#[test]
fn reports_are_byte_identical_without_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let f = small_fuzz(dir.path());
    for out in [&a, &b] {
        let (code, _) = run(&["fuzz", path_str(&f), "--no-timestamp", "-o", path_str(out)]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn seed_flag_changes_fuzz_draws() {
    let dir = tempfile::tempdir().unwrap();
    let f = small_fuzz(dir.path());
    let (_, a) = report(&["fuzz", path_str(&f), "--no-timestamp", "--seed", "11"]);
    let (_, b) = report(&["fuzz", path_str(&f), "--no-timestamp", "--seed", "12"]);
    assert_eq!(a["seed"], 11);
    assert_ne!(a["result"]["records"], b["result"]["records"]);
}

#[test]
fn sharpness_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let (code, r) =
        report(&["sharpness", path_str(&scenario("hardy-p2.json")), "--no-timestamp", "--emit-csv", path_str(&csv)]);
    assert_eq!(code, 0);
    let limit = r["result"]["limit"].as_f64().unwrap();
    assert!((limit - 2.0).abs() < 1e-3);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("epsilon,ratio,target,margin"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        assert!((row[3] - (row[2] - row[1])).abs() < 1e-12);
    }
}

#[test]
fn norms_and_eval_commands() {
    let (code, r) = report(&["norms", path_str(&scenario("weighted-norms.json")), "--no-timestamp"]);
    assert_eq!(code, 0, "{r}");
    let (code, r) = report(&["eval", path_str(&scenario("hardy-eval.json")), "--no-timestamp"]);
    assert_eq!(code, 0, "{r}");
}

#[test]
fn radii_flag_sets_morrey_grid() {
    let (code, r) = report(&["norms", path_str(&scenario("morrey.json")), "--no-timestamp", "--radii-J", "5"]);
    assert_eq!(code, 0, "{r}");
    let radii = r["result"]["inputs"][0]["quadrature"]["radii"].as_array().unwrap();
    assert_eq!(radii.len(), 11);
    assert_eq!(radii[0], 1.0 / 32.0);
}

#[test]
fn suite_over_directory() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["hardy-p2.json", "divergent.json", "morrey-unbalanced.json", "hausdorff.json"] {
        std::fs::copy(scenario(name), dir.path().join(name)).unwrap();
    }
    let (code, r) = report(&["suite", path_str(dir.path()), "--no-timestamp"]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["checks"].as_array().unwrap().len(), 4);

    // a scenario whose declared exit disagrees fails the suite
    let text = std::fs::read_to_string(scenario("divergent.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["task"]["expect_exit"] = Value::from(0);
    std::fs::write(dir.path().join("divergent.json"), serde_json::to_string(&v).unwrap()).unwrap();
    let (code, _) = report(&["suite", path_str(dir.path()), "--no-timestamp"]);
    assert_eq!(code, 1);
}

#[test]
fn bundled_suite_passes() {
    let (code, r) = report(&["suite", "--no-timestamp"]);
    assert_eq!(code, 0, "{}", r["checks"]);
}
