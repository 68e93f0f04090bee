//! End-to-end tests of the `bcc` binary: command surface, exit codes, and
//! JSON report round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcc")).args(args).output().expect("spawn bcc")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("bcc-test-{}-{}", std::process::id(), name));
    std::fs::write(&path, contents).unwrap();
    path
}

const CONIC: &str = r#"{ "schema": 1, "strands": 2, "factors": [
    { "conjugator": [], "core": 1, "exp": 1 },
    { "conjugator": [], "core": 1, "exp": 1 } ] }"#;

#[test]
fn invariants_text_report() {
    let out = bcc(&["invariants", "--template", "cp1xcp1", "--p", "2", "--q", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("(Z_2)^11"), "{text}");
    assert!(text.contains("match"));
    assert!(text.contains("yes"));
}

#[test]
fn invariants_json_roundtrip() {
    let out = bcc(&["invariants", "--template", "f1", "--p", "4", "--q", "2", "--json"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["schema"], 1);
    // canonical re-emission is byte-identical
    let reemitted = serde_json::to_string_pretty(&value).unwrap();
    assert_eq!(text.trim_end(), reemitted);
}

#[test]
fn invariants_double_cover_even_case() {
    let out = bcc(&[
        "invariants", "--template", "doublecover", "--a", "2", "--b", "2", "--p", "2", "--q", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("Z_2 x Z_2"), "{text}");
    assert!(text.contains("redundant"), "{text}");
}

#[test]
fn invariants_homology_only_template() {
    let out = bcc(&["invariants", "--template", "cp2", "--k", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("homology side only"), "{text}");
    assert!(text.contains("Z_3 + Z"), "{text}");
}

#[test]
fn invariants_from_spec_file() {
    let spec = write_temp("spec.json", r#"{"template":"cp1xcp1","params":{"p":2,"q":2}}"#);
    let out = bcc(&["invariants", "--spec", spec.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("Z_2 + Z"));
}

#[test]
fn invariants_rejects_bad_parameters() {
    let out = bcc(&["invariants", "--template", "cp1xcp1", "--p", "1", "--q", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    let value: serde_json::Value = serde_json::from_str(&err).unwrap();
    assert!(value["error"].as_str().unwrap().contains("requires p, q >= 2"));
}

#[test]
fn catalog_listing_and_entry() {
    let out = bcc(&["catalog"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("hirzebruch_dc"));
    let out = bcc(&["catalog", "--name", "k3", "--k", "4", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["quotient"], "Z_4 + Z");
    // conjectural entries are marked
    let out = bcc(&[
        "catalog", "--name", "hirzebruch_dc", "--m", "1", "--a", "2", "--p", "5", "--q", "2",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("conjectural"));
}

#[test]
fn verify_suites_exit_codes_and_json() {
    let out = bcc(&["verify", "--suite", "vk-oracle", "--json"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["pass"], true);
    let reemitted = serde_json::to_string_pretty(&value).unwrap();
    assert_eq!(text.trim_end(), reemitted);
    let out = bcc(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_conjecture16_with_workers() {
    let out = Command::new(env!("CARGO_BIN_EXE_bcc"))
        .args(["verify", "--suite", "conjecture16", "--template", "all", "--pmax", "3"])
        .env("BCC_WORKERS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("cp1xcp1"));
    assert!(text.contains("doublecover"));
    assert!(text.contains("all checks passed"));
}

#[test]
fn vankampen_conic() {
    let file = write_temp("conic.json", CONIC);
    let theta = write_temp("theta.json", r#"{ "n": 2, "images": [[1,2],[1,2]] }"#);
    let out = bcc(&[
        "vankampen",
        "--file",
        file.to_str().unwrap(),
        "--theta",
        theta.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("abelianization             Z"), "{text}");
    assert!(text.contains("consistent"));
    // projective variant is Z_2
    let out = bcc(&["vankampen", "--file", file.to_str().unwrap(), "--projective"]);
    assert!(stdout(&out).contains("Z_2"));
}

#[test]
fn vankampen_partial_cusp() {
    let cusp = write_temp(
        "cusp.json",
        r#"{ "strands": 2, "factors": [ { "conjugator": [], "core": 1, "exp": 3 } ] }"#,
    );
    // without --partial the full-twist precondition rejects it
    let out = bcc(&["vankampen", "--file", cusp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // with --partial the braid relation is emitted
    let out = bcc(&["vankampen", "--file", cusp.to_str().unwrap(), "--partial", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let relators = value["presentation"]["relators"].as_array().unwrap();
    assert_eq!(relators.len(), 1);
    assert_eq!(
        relators[0],
        serde_json::json!([1, 2, 1, -2, -1, -2]),
        "cusp emits the braid relation"
    );
}

#[test]
fn vankampen_inconsistent_theta_fails() {
    let node = write_temp(
        "node.json",
        r#"{ "strands": 2, "factors": [ { "conjugator": [], "core": 1, "exp": 2 } ] }"#,
    );
    // a node with equal (hence non-disjoint) images violates the
    // disjointness consequence
    let theta = write_temp("theta-bad.json", r#"{ "n": 2, "images": [[1,2],[1,2]] }"#);
    let out = bcc(&[
        "vankampen",
        "--file",
        node.to_str().unwrap(),
        "--partial",
        "--theta",
        theta.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("violation"));
}

#[test]
fn vankampen_stabilize_depth_keeps_abelianization() {
    let file = write_temp("conic2.json", CONIC);
    let theta = write_temp("theta2.json", r#"{ "n": 2, "images": [[1,2],[1,2]] }"#);
    let base = bcc(&["vankampen", "--file", file.to_str().unwrap(), "--json"]);
    let stabilized = bcc(&[
        "vankampen",
        "--file",
        file.to_str().unwrap(),
        "--theta",
        theta.to_str().unwrap(),
        "--stabilize-depth",
        "2",
        "--json",
    ]);
    let v1: serde_json::Value = serde_json::from_str(&stdout(&base)).unwrap();
    let v2: serde_json::Value = serde_json::from_str(&stdout(&stabilized)).unwrap();
    assert_eq!(v1["abelianization"], v2["abelianization"]);
}
