use std::process::{Command, Output};

use serde_json::Value;

fn circperm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circperm")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_lines(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn exponents(entry: &Value) -> Vec<u64> {
    entry["poly"]["terms"].as_array().unwrap().iter().map(|t| t[0].as_u64().unwrap()).collect()
}

#[test]
fn construct_the_q5_quadrinomial() {
    let o = circperm(&[
        "construct",
        "--p",
        "5",
        "--m",
        "1",
        "--family",
        "Q1",
        "--beta",
        "-1",
        "--delta",
        "g",
        "--delta-t",
        "g",
        "--beta-t",
        "1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let e = &json_lines(&o)[0];
    assert_eq!(exponents(e), vec![15, 11, 7, 3]);
    assert_eq!(e["report"]["is_permutation"], true);
    assert_eq!(e["report"]["method"], "both");
    assert_eq!(e["provenance"], "user");
}

#[test]
fn grid_matches_library_count() {
    let o = circperm(&["construct", "--family", "Q1", "--grid", "--p", "5", "--m", "1", "--workers", "2"]);
    assert_eq!(code(&o), 0);
    let lines = json_lines(&o);
    let ext = circperm::QuadExtension::canonical(5, 1).unwrap();
    let n = circperm::constructions::param_grid(&ext, circperm::constructions::FamilyId::Q1, Default::default())
        .unwrap()
        .count();
    assert_eq!(lines.len(), n);
    assert!(lines.iter().all(|e| e["report"]["is_permutation"] == true && e["provenance"] == "grid"));
}

#[test]
fn grid_output_order_ignores_worker_count() {
    let one = circperm(&["--p", "2", "--m", "2", "construct", "--family", "P4", "--grid", "--workers", "1"]);
    let four = circperm(&["--p", "2", "--m", "2", "construct", "--family", "P4", "--grid", "--workers", "4"]);
    let strip = |o: &Output| -> Vec<Value> {
        json_lines(o)
            .into_iter()
            .map(|mut e| {
                e["report"]["ms"] = Value::Null;
                e
            })
            .collect()
    };
    assert_eq!(strip(&one), strip(&four));
}

#[test]
fn unknown_family_is_an_input_error() {
    let o = circperm(&["construct", "--p", "5", "--m", "1", "--family", "Q9", "--grid"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn violations_are_reported_as_json() {
    // beta = 1 with beta~ = 1 breaks the Q1 relation
    let o = circperm(&[
        "construct",
        "--p",
        "5",
        "--m",
        "1",
        "--family",
        "Q1",
        "--beta",
        "1",
        "--beta-t",
        "1",
        "--delta",
        "g",
        "--delta-t",
        "g",
    ]);
    assert_eq!(code(&o), 2);
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(!err["violations"].as_array().unwrap().is_empty());
}

#[test]
fn verify_exit_codes() {
    // 3 divides 24, so X^3 does not permute GF(25)
    let o = circperm(&["--p", "5", "--m", "1", "verify", "X^3"]);
    assert_eq!(code(&o), 1);
    let o = circperm(&["--p", "3", "--m", "1", "verify", "X^3"]);
    assert_eq!(code(&o), 0);
    let o = circperm(&["--p", "3", "--m", "1", "verify", "X^2"]);
    assert_eq!(code(&o), 1);
    let rep = &json_lines(&o)[0];
    assert_eq!(rep["witness"].as_array().unwrap().len(), 2);
    let o = circperm(&["--p", "3", "--m", "1", "verify", "X^^2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn cap_exceeded_is_exit_3() {
    let o = circperm(&["--p", "2", "--m", "5", "--cap", "256", "verify", "X"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn qm_self_test_has_identity_witness() {
    let f = "g^3*X^15 + g*X^11 + X^7 + 2*X^3";
    let o = circperm(&["--p", "5", "--m", "1", "qm-test", "--f", f, "--g", f]);
    assert_eq!(code(&o), 0);
    let r = &json_lines(&o)[0];
    assert_eq!(r["equivalent"], true);
    assert_eq!(r["witness"]["u"]["pow"], 0);
    assert_eq!(r["witness"]["v"]["pow"], 0);
    assert_eq!(r["witness"]["d"], 1);
}

#[test]
fn qm_searches_agree_on_inequivalent_pair() {
    for search in ["roots", "brute", "functional"] {
        let o = circperm(&["--p", "2", "--m", "2", "qm-test", "--f", "X^6 + g*X", "--g", "X^3", "--search", search]);
        assert_eq!(code(&o), 1, "{search}");
    }
}

#[test]
fn classify_a_catalog_file() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("b1.jsonl");
    let annotated = dir.path().join("b1-classes.jsonl");
    let o =
        circperm(&["--p", "2", "--m", "2", "construct", "--family", "B1", "--grid", "--out", cat.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = circperm(&["qm-classify", "--catalog", cat.to_str().unwrap(), "--annotate", annotated.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let part = &json_lines(&o)[0];
    let class_of = part["class_of"].as_array().unwrap();
    let entries = std::fs::read_to_string(&annotated).unwrap();
    assert_eq!(entries.lines().count(), class_of.len());
    let classes = part["classes"].as_array().unwrap().len();
    assert!(classes >= 1 && classes <= class_of.len());
    let first: Value = serde_json::from_str(entries.lines().next().unwrap()).unwrap();
    assert_eq!(first["qm_class"], class_of[0]);
}

#[test]
fn csv_export_has_header_and_rows() {
    let o = circperm(&["--p", "2", "--m", "2", "construct", "--family", "B2", "--grid", "--csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), circperm::catalog::CSV_HEADER);
    assert!(lines.all(|l| l.starts_with("2,4,B2,grid,")));
}

#[test]
fn field_from_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, r#"{"p": 3, "modulus": [2, 2, 1]}"#).unwrap();
    let o = circperm(&["--field", path.to_str().unwrap(), "field-info"]);
    assert_eq!(code(&o), 0);
    let info = &json_lines(&o)[0];
    assert_eq!(info["q"], 3);
    assert_eq!(info["circle_size"], 4);
    let o = circperm(&["--field", r#"{"p": 3, "modulus": [2, 0, 1]}"#, "field-info"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn repro_reports_every_example() {
    let o = circperm(&["repro"]);
    let exit = code(&o);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows = text.lines().filter(|l| l.ends_with("  PASS") || l.ends_with("  FAIL")).count();
    assert_eq!(rows, circperm::repro::EXAMPLES.len());
    assert!(text.contains("stated moduli"));
    let all_pass = !text.lines().any(|l| l.ends_with("  FAIL"));
    assert_eq!(exit == 0, all_pass);
}
