use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hhcalc"))
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples_data").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn results(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("json report");
    v["results"].clone()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn hh_dims_of_the_cycle_and_the_hereditary_example() {
    let out = run(&["hh", path_str(&example("ex3_5_C"))]);
    assert!(out.status.success());
    assert_eq!(results(&out)["dims"], serde_json::json!([1, 1]));
    let out = run(&["hh", path_str(&example("ex3_8_C")), "--max-degree", "1"]);
    assert_eq!(results(&out)["dims"], serde_json::json!([1, 2]));
}

#[test]
fn hh_reps_are_listed_per_degree() {
    let out = run(&["hh", path_str(&example("ex3_8_C")), "--reps"]);
    let r = results(&out);
    assert_eq!(r["reps"].as_array().unwrap().len(), 2);
    assert_eq!(r["reps"][1].as_array().unwrap().len(), 2);
}

#[test]
fn phi_on_presented_extensions() {
    let c = example("ex3_8_C");
    let b = format!("split:{}", path_str(&example("ex3_8_B")));
    let r = results(&run(&["phi", path_str(&c), "--bimodule", &b, "--degree", "1"]));
    assert_eq!(r["rank"], 1);
    assert_eq!(r["surjective"], false);

    let c = example("ex3_5_C");
    let b = format!("split:{}", path_str(&example("ex3_5_B")));
    let r = results(&run(&["phi", path_str(&c), "--bimodule", &b]));
    assert_eq!(r["rank"], 1);
    assert_eq!(r["surjective"], true);
}

#[test]
fn phi2_vanishes_for_the_second_ext_module() {
    let r = results(&run(&["phi", path_str(&example("ex5_9_C")), "--bimodule", "ext:2", "--degree", "2"]));
    assert_eq!(r["rank"], 0);
    let m = r["matrix"].as_array().unwrap();
    assert!(m.iter().flat_map(|row| row.as_array().unwrap()).all(|x| x == "0"));
}

#[test]
fn relext_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("b.json");
    let out = run(&["relext", path_str(&example("ex5_9_C")), "--names", "delta", "--out", path_str(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = results(&out);
    let mut rels: Vec<String> =
        r["relations"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect();
    rels.sort();
    assert_eq!(rels, ["alpha*beta", "beta*delta", "delta*alpha", "delta*gamma*delta"]);
    assert_eq!(r["checks"]["dim_b"], 10);

    let b = results(&run(&["hh", path_str(&out_path), "--max-degree", "2"]));
    assert_eq!(b["algebra"]["dim"], 10);
    assert_eq!(b["dims"], r["checks"]["hh_b"]);
}

#[test]
fn relext_of_a_hereditary_algebra_echoes_it() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("a2.json");
    std::fs::write(
        &c,
        r#"{"field":"Q","vertices":["1","2"],"arrows":[{"name":"a","from":"1","to":"2"}],"relations":[]}"#,
    )
    .unwrap();
    let r = results(&run(&["relext", path_str(&c)]));
    assert_eq!(r["new_arrows"].as_array().unwrap().len(), 0);
    assert_eq!(r["relations"].as_array().unwrap().len(), 0);
    assert_eq!(r["checks"]["dim_b"], 3);
}

#[test]
fn non_triangular_input_exits_2() {
    let out = run(&["relext", path_str(&example("ex3_5_C"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangular"));
    assert!(out.stdout.is_empty());
}

#[test]
fn field_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("loop.json");
    std::fs::write(&f, r#"{"field":"Fp:2","vertices":["1"],"arrows":[{"name":"x","from":"1","to":"1"}],"relations":[]}"#)
        .unwrap();
    let out = run(&["hh", path_str(&f), "--field", "Q"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("field mismatch"));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["hh", path_str(&example("ex3_5_C")), "--module", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["hh", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["verify-paper", "--only", "nope"]).status.code(), Some(2));
}

#[test]
fn cap_is_enforced() {
    let out = run(&["hh", path_str(&example("ex3_8_B")), "--max-degree", "3", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn reports_are_deterministic() {
    let c = example("ex5_9_C");
    let args = ["phi", path_str(&c), "--bimodule", "ext:2", "--degree", "1"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v.get("timing_ms").is_none());
    assert_eq!(v["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn verify_paper_single_block() {
    let out = run(&["verify-paper", "--only", "ex3.5"]);
    assert!(out.status.success());
    let blocks = results(&out)["blocks"].as_array().unwrap().clone();
    assert_eq!(blocks.len(), 1);
    assert_eq!(blocks[0]["id"], "ex3.5");
    assert_eq!(blocks[0]["passed"], true);
}

#[test]
fn corrupted_example_fails_with_the_check_named() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(example("ex5_9_C")).unwrap();
    let broken = text.replace(r#"["alpha*beta"]"#, "[]");
    assert_ne!(text, broken);
    std::fs::write(dir.path().join("ex5_9_C.json"), broken).unwrap();
    let out = run(&["verify-paper", "--only", "relext", "--examples", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let r = results(&out);
    assert_eq!(r["passed"], false);
    let failed: Vec<String> = r["blocks"][0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().any(|n| n == "potential" || n == "relations of B"), "{failed:?}");
}

#[test]
fn unparsable_override_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ex3_5_C.json"), "{ not json").unwrap();
    let out = run(&["verify-paper", "--examples", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}
