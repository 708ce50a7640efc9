use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lovx_cli::report::without_timing;
use serde_json::Value;
use tempfile::TempDir;

fn lovx(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lovx"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("k3.el"), "0 1\n1 2\n0 2\n").unwrap();
    std::fs::write(dir.path().join("neg_k3.el"), "0 1 1 -1\n1 2 1 -1\n0 2 1 -1\n").unwrap();
    std::fs::write(dir.path().join("p3.el"), "# path\n0 1\n1 2\n").unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn oracle_maxcut_on_triangle() {
    let dir = workspace();
    let out = lovx(&["oracle", "--problem", "maxcut", "--graph", "k3.el"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "lovx-report/1");
    assert_eq!(v["value"], 2.0);
    assert_eq!(v["witness"], serde_json::json!([0]));
    assert_eq!(v["witnesses_reevaluated"], true);
}

#[test]
fn frustration_on_negative_triangle() {
    let dir = workspace();
    let base = ["solve", "--problem", "frustration", "--graph", "neg_k3.el", "--algo", "ipsd", "--seed", "7"];
    let single = json(&lovx(&base, dir.path()));
    assert!(single["value"].as_f64().unwrap() >= 1.0);
    let mut args = base.to_vec();
    args.extend(["--multistart", "4"]);
    let out = lovx(&args, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let multi = json(&out);
    assert_eq!(multi["value"], 1.0);
    assert_eq!(multi["runs"].as_array().unwrap().len(), 3 + 4);
    assert_eq!(multi["seed"], 7);
}

#[test]
fn eigenvalues_of_the_path() {
    let dir = workspace();
    let out = lovx(&["eigen", "--pair", "cut", "--graph", "p3.el", "--verify"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["eigenvalues"], serde_json::json!([0.0, 1.0, 2.0]));
    assert_eq!(v["verified"], true);
}

#[test]
fn recursive_frustration_and_dinkelbach() {
    let dir = workspace();
    let v = json(&lovx(
        &["solve", "--problem", "frustration", "--graph", "neg_k3.el", "--algo", "recursive-frustration"],
        dir.path(),
    ));
    assert_eq!(v["value"], 1.0);
    let v = json(&lovx(
        &["solve", "--problem", "cheeger", "--graph", "bundled:two-triangles", "--algo", "dinkelbach"],
        dir.path(),
    ));
    assert!((v["value"].as_f64().unwrap() - 1.0 / 7.0).abs() < 1e-12);
    assert_eq!(v["trace"]["monotone"], true);
}

#[test]
fn eval_set_and_point() {
    let dir = workspace();
    let v = json(&lovx(&["eval", "--problem", "maxcut", "--graph", "k3.el", "--set", "0"], dir.path()));
    assert_eq!(v["value"], 2.0);
    assert_eq!(v["forms"]["pair"]["value"], 2.0);
    let v = json(&lovx(
        &["eval", "--problem", "maxcut", "--graph", "k3.el", "--point", "1,0.5,-1"],
        dir.path(),
    ));
    assert_eq!(v["forms"]["pair"]["value"], 2.0);
}

#[test]
fn tsv_is_a_header_and_one_row() {
    let dir = workspace();
    let out = lovx(&["--output", "tsv", "oracle", "--problem", "maxcut", "--graph", "k3.el"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let header: Vec<&str> = lines[0].split('\t').collect();
    let row: Vec<&str> = lines[1].split('\t').collect();
    assert_eq!(header.len(), row.len());
    assert_eq!(row[header.iter().position(|h| *h == "value").unwrap()], "2");
}

#[test]
fn configuration_errors_exit_one() {
    let dir = workspace();
    for args in [
        vec!["oracle", "--problem", "nope", "--graph", "k3.el"],
        vec!["oracle", "--problem", "maxcut", "--graph", "missing.el"],
        vec!["solve", "--problem", "maxcut", "--graph", "k3.el", "--tol", "0"],
        vec!["solve", "--problem", "maxcut", "-P", "q=2", "--graph", "k3.el"],
        vec!["solve", "--problem", "chromatic", "--graph", "k3.el"],
        vec!["eval", "--problem", "maxcut", "--graph", "k3.el", "--set", "0", "--point", "1,0,0"],
        vec!["oracle", "--problem", "maxcut", "--graph", "k3.el", "--bogus"],
    ] {
        let out = lovx(&args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    let bad = write(dir.path(), "loop.el", "0 0\n");
    let out = lovx(&["oracle", "--problem", "maxcut", "--graph", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failed_certification_exits_two_with_report() {
    let dir = workspace();
    let f = write(dir.path(), "f.json", r#"{"n": 1, "kind": "pair", "values": {"+": 1, "-": 3}}"#);
    let g = write(dir.path(), "g.json", r#"{"n": 1, "kind": "pair", "values": {"+": 1, "-": 1}}"#);
    let out = lovx(
        &["eigen", "--pair", "table", "--f", f.to_str().unwrap(), "--g", g.to_str().unwrap(), "--verify"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["eigenvalues"], serde_json::json!([1.0, 3.0]));
    let out = lovx(
        &[
            "eigen", "--pair", "table", "--f", f.to_str().unwrap(), "--g", g.to_str().unwrap(),
            "--lambda", "2", "--at", "0/",
        ],
        dir.path(),
    );
    let v = json(&out);
    assert_eq!(v["verified"], false, "{v}");
    assert_eq!(v["candidate"]["verdict"], "rejected");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_suite_passes_and_corrupted_table_fails() {
    let dir = workspace();
    let out = lovx(&["check"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["passed"], true);

    // Cut function of the triangle, then the same table with one entry raised.
    let good = r#"{"n": 3, "kind": "powerset", "values": {"100": 2, "010": 2, "001": 2, "110": 2, "101": 2, "011": 2, "111": 0}}"#;
    let p = write(dir.path(), "cut.json", good);
    let out = lovx(&["check", "--table", p.to_str().unwrap(), "--expect", "submodular"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let p = write(dir.path(), "bad.json", &good.replace("\"110\": 2", "\"110\": 5"));
    let out = lovx(&["check", "--table", p.to_str().unwrap(), "--expect", "submodular"], dir.path());
    assert_ne!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    let failure = v["suites"][0]["failures"][0].as_str().unwrap();
    assert!(failure.contains("witness"), "{failure}");
}

#[test]
fn seeded_reruns_are_byte_identical() {
    let dir = workspace();
    let runs: [&[&str]; 3] = [
        &["solve", "--problem", "maxcut", "--graph", "bundled:petersen", "--multistart", "6", "--seed", "11"],
        &["check", "--seed", "5"],
        &["solve", "--problem", "frustration", "--graph", "neg_k3.el", "--algo", "recursive-frustration", "--seed", "3"],
    ];
    for args in runs {
        let a = lovx(args, dir.path());
        let b = Command::new(env!("CARGO_BIN_EXE_lovx"))
            .args(args)
            .current_dir(dir.path())
            .env("LOVX_THREADS", "1")
            .output()
            .unwrap();
        let (a, b) = (String::from_utf8(a.stdout).unwrap(), String::from_utf8(b.stdout).unwrap());
        assert_eq!(without_timing(&a), without_timing(&b), "{args:?}");
    }
}

#[test]
fn thread_cap_must_be_positive() {
    let dir = workspace();
    let out = Command::new(env!("CARGO_BIN_EXE_lovx"))
        .args(["graphs"])
        .current_dir(dir.path())
        .env("LOVX_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
