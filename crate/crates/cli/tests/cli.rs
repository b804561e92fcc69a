use std::path::PathBuf;
use std::process::Command;

use hpd_core::family::{hirzebruch_nagata, hopf, p2, torus, FamilySpec, P2_DIRECTIONS};

fn example(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "examples", name].iter().collect()
}

fn hpd(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hpd")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn load(name: &str) -> FamilySpec {
    serde_json::from_str(&std::fs::read_to_string(example(name)).unwrap()).unwrap()
}

#[test]
fn shipped_documents_match_builders() {
    assert_eq!(load("p2_5param.json"), p2("x", &P2_DIRECTIONS, 3));
    assert_eq!(load("hopf.json"), hopf(2, true));
    assert_eq!(load("hopf_free.json"), hopf(2, false));
    assert_eq!(load("hirzebruch_m2_k1.json"), hirzebruch_nagata(2, 1, 3).unwrap());
    assert_eq!(load("torus.json"), torus(2));
}

#[test]
fn binary_exit_codes() {
    let p2 = example("p2.json");
    let p2 = p2.to_str().unwrap();
    let (code, out, _) = hpd(&["cohomology", "--family", p2, "-k", "1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("H^1: dimension 5 (stable)"));
    let (code, _, _) = hpd(&["validate", "--family", example("hopf_free.json").to_str().unwrap()]);
    assert_eq!(code, 1);
    let (code, _, err) = hpd(&["validate", "--family", "/definitely/not/here.json", "--json"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&err).unwrap();
    assert_eq!(v["error"]["kind"], "io");
    let (code, _, _) = hpd(&["cohomology", "--family", example("hopf.json").to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn expression_errors_carry_an_offset() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = load("p2.json");
    spec.bivectors.insert("U0".into(), "x*dx^^dw".into());
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&spec).unwrap()).unwrap();
    let (code, _, err) = hpd(&["validate", "--family", path.to_str().unwrap(), "--json"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&err).unwrap();
    assert_eq!(v["error"]["kind"], "parse");
    assert!(v["error"]["location"]["offset"].is_u64());
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let fam = example("p2.json");
    let args = ["cohomology", "--family", fam.to_str().unwrap(), "-k", "2", "--weight-window", "-2:2", "--box", "5", "--json"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", out.to_str().unwrap()]);
    let (code, stdout, _) = hpd(&with_out);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["schema"], hpd_cli::REPORT_SCHEMA);
    assert_eq!(v["settings"]["window"], serde_json::json!([-2, 2]));
    assert_eq!(v["settings"]["box"], 5);
}

#[test]
fn example_command_round_trips() {
    let (code, out, _) = hpd(&["example", "hirzebruch", "--m", "4", "--k", "2", "--order", "2"]);
    assert_eq!(code, 0);
    let spec: FamilySpec = serde_json::from_str(&out).unwrap();
    assert_eq!(spec, hirzebruch_nagata(4, 2, 2).unwrap());
    assert_eq!(hpd(&["example", "nope"]).0, 2);
}

#[test]
fn order_flag_truncates_the_family() {
    let fam = example("p2_5param.json");
    let (code, out, _) = hpd(&["validate", "--family", fam.to_str().unwrap(), "--order", "1", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["settings"]["order"], 1);
}
