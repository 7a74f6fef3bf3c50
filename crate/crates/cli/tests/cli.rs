use std::process::{Command, Output};

fn qzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qzeta")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp_file(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("qzeta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn counts_heisenberg() {
    let o = qzeta(&["count", "--builtin", "heisenberg", "--prime", "2", "--max-exp", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Vec<String>> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(String::from).collect())
        .collect();
    assert_eq!(rows, [["0", "1"], ["1", "3"], ["2", "7"]]);
}

#[test]
fn count_table_written_as_json() {
    let out = temp_file("counts.json", "");
    let o = qzeta(&[
        "count", "--builtin", "graded_heisenberg", "--prime", "2", "--max-exp", "3", "--multivariate", "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["prime"], 2);
    assert_eq!(v["mode"], "multivariate");
    assert_eq!(v["counts"]["2,1"], 1);
    assert!(v["counts"].get("0,1").is_none());
}

#[test]
fn d4_functional_equation() {
    let o = qzeta(&["funeq", "--builtin", "d4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("observed  W(1/q, 1/t) / W = -q*t^8"), "{text}");
    assert!(text.contains("holds"));
}

#[test]
fn mismatched_formula_exits_with_one() {
    let o = qzeta(&["funeq", "--builtin", "heisenberg", "--formula", "d4", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["holds"], false);
    assert!(v["report"]["residual"].is_string());
}

#[test]
fn star_formula_text() {
    let o = qzeta(&["formula", "--name", "star_thin", "--params", "a=3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "(1+t^2)/((1-t)(1-t^2)(1-t^3))");
}

#[test]
fn formula_series_at_a_prime() {
    let o = qzeta(&["formula", "--name", "heisenberg", "--series", "2", "--at-q", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!(["1", "3", "7"]));
}

#[test]
fn poset_commands() {
    let fork = temp_file("fork.json", r#"{"n":4,"covers":[[1,2],[1,3],[3,4]]}"#);
    let o = qzeta(&[
        "ppart", "--poset", fork.to_str().unwrap(), "--check-delta", "--verify-quiver", "--prime", "3", "--bound", "4",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["delta_chain"]["holds"], false);
    assert_eq!(v["verify_quiver"]["agree"], true);
}

#[test]
fn homogeneity_exit_codes() {
    assert_eq!(qzeta(&["homog", "--builtin", "graded_heisenberg"]).status.code(), Some(0));
    let o = qzeta(&["homog", "--builtin", "fil4", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["homogeneous"], false);
    assert!(v["witness"].is_object());
}

#[test]
fn input_errors_exit_with_two() {
    let bad = temp_file("bad.json", "{\"vertices\": [");
    for args in [
        vec!["count", "--builtin", "nope", "--prime", "2", "--max-exp", "2"],
        vec!["count", "--builtin", "heisenberg", "--prime", "4", "--max-exp", "2"],
        vec!["count", "--builtin", "heisenberg", "--prime", "2", "--max-exp", "3", "--ceiling", "5"],
        vec!["count", "--rep", bad.to_str().unwrap(), "--prime", "2", "--max-exp", "2"],
        vec!["formula", "--name", "star_thin"],
        vec!["frobnicate"],
    ] {
        let o = qzeta(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn resource_refusal_names_the_limit() {
    let o = qzeta(&["count", "--builtin", "heisenberg", "--prime", "2", "--max-exp", "3", "--ceiling", "5"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("limit 5"), "{err}");
}
