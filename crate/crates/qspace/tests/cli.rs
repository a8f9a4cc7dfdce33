use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qspace")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qspace-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn put(dir: &Path, file: &str, text: &str) -> String {
    let p = dir.join(file);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const IDENTITY: &str = r#"{"dim": 4, "entries": [[0,0,1.0,0.0],[1,1,1.0,0.0],[2,2,1.0,0.0],[3,3,1.0,0.0]]}"#;
const ZERO: &str = r#"{"dim": 2, "entries": []}"#;
const BELL: &str = r#"{"qubits": 2, "out": 0, "gates": [{"kind": "h", "targets": [0]},
    {"kind": "cnot", "targets": [1], "controls": [0]}]}"#;

#[test]
fn invert_identity_diagonal_and_off_diagonal() {
    let d = scratch("invert");
    let m = put(&d, "id.json", IDENTITY);
    let yes = qspace(&["invert", "--matrix", &m, "--s", "0", "--t", "0", "--a", "0.3", "--b", "0.6", "--verify-oracle"]);
    assert_eq!(code(&yes), 0, "{}", String::from_utf8_lossy(&yes.stderr));
    let r = json(&yes);
    assert_eq!(r["decision"], true);
    assert_eq!(r["pass"], true);
    assert!((r["estimate"].as_f64().unwrap() - 1.0).abs() <= 0.01);

    let no = qspace(&["invert", "--matrix", &m, "--s", "0", "--t", "1", "--a", "0.3", "--b", "0.6"]);
    assert_eq!(code(&no), 1);
    assert_eq!(json(&no)["decision"], false);
}

#[test]
fn mineig_zero_and_identity() {
    let d = scratch("mineig");
    let z = put(&d, "zero.json", ZERO);
    let i = put(&d, "id.json", IDENTITY);
    let yes = qspace(&["mineig", "--matrix", &z, "--a", "0.1", "--b", "0.5", "--verify-oracle"]);
    assert_eq!(code(&yes), 0);
    assert_eq!(json(&yes)["pass"], true);
    let no = qspace(&["mineig", "--matrix", &i, "--a", "0.1", "--b", "0.5", "--verify-oracle"]);
    assert_eq!(code(&no), 1);
    assert_eq!(json(&no)["pass"], true);
    let noisy = qspace(&["mineig", "--matrix", &i, "--a", "0.1", "--b", "0.5", "--inject-eps", "1e-3"]);
    assert_eq!(code(&noisy), 1);
}

#[test]
fn malformed_and_promise_exit_codes() {
    let d = scratch("errors");
    let bad = put(&d, "bad.json", "{not json");
    assert_eq!(code(&qspace(&["invert", "--matrix", &bad, "--s", "0", "--t", "0", "--a", "0.3", "--b", "0.6"])), 2);
    let below = put(&d, "below.json", r#"{"dim": 2, "entries": [[1, 0, 1.0, 0.0]]}"#);
    assert_eq!(code(&qspace(&["mineig", "--matrix", &below, "--a", "0.1", "--b", "0.5"])), 2);
    let missing = d.join("missing.json");
    assert_eq!(code(&qspace(&["mineig", "--matrix", missing.to_str().unwrap(), "--a", "0.1", "--b", "0.5"])), 2);
    // usage errors also exit 2
    assert_eq!(code(&qspace(&["invert"])), 2);
    assert_eq!(code(&qspace(&["mineig", "--matrix", &bad, "--exact-evolution", "--inject-eps", "0.1"])), 2);

    let diag = put(&d, "diag.json", r#"{"dim": 2, "entries": [[0,0,1.0,0.0],[1,1,0.5,0.0]]}"#);
    let pv = qspace(&["invert", "--matrix", &diag, "--s", "1", "--t", "1", "--a", "1.5", "--b", "2.5"]);
    assert_eq!(code(&pv), 3);
    let low = put(&d, "low.json", r#"{"dim": 2, "entries": [[0,0,0.2,0.0],[1,1,1.0,0.0]]}"#);
    assert_eq!(code(&qspace(&["mineig", "--matrix", &low, "--a", "0.1", "--b", "0.3"])), 3);
}

#[test]
fn qca_artifact_feeds_invert() {
    let d = scratch("qca");
    let c = put(&d, "bell.json", BELL);
    let art = d.join("qca.json");
    let red = qspace(&["reduce", "qca", "--circuit", &c, "--out", art.to_str().unwrap()]);
    assert_eq!(code(&red), 0, "{}", String::from_utf8_lossy(&red.stderr));
    let inv = qspace(&["invert", "--matrix", art.to_str().unwrap(), "--circuit", &c]);
    let r = json(&inv);
    let formula = r["details"]["formula"].as_f64().unwrap();
    assert!((r["estimate"].as_f64().unwrap() - formula).abs() <= 0.01, "{r}");
    // thresholds come from the artifact
    assert_eq!(code(&qspace(&["invert", "--matrix", art.to_str().unwrap(), "--s", "0"])), 2);

    let other = put(&d, "other.json", &BELL.replace("\"h\"", "\"x\""));
    assert_eq!(code(&qspace(&["invert", "--matrix", art.to_str().unwrap(), "--circuit", &other])), 2);
}

#[test]
fn qca_verify_reports_kappa_against_2t() {
    let d = scratch("qca-verify");
    let c = put(&d, "bell.json", BELL);
    let out = qspace(&["reduce", "qca", "--circuit", &c, "--verify-oracle"]);
    let r = json(&out);
    // two gates: coth(1/4) exceeds 2T = 4
    assert_eq!(r["details"]["kappa_le_2t"], false);
    assert!(r["details"]["entry_error"].as_f64().unwrap() <= 1e-9);
    assert_eq!(code(&out), 1);
}

#[test]
fn clock_and_walk_reductions() {
    let d = scratch("clock");
    // always accepts: X on the output qubit, then a CNOT that leaves it alone
    let v = put(
        &d,
        "v.json",
        r#"{"qubits": 2, "out": 0, "m": 0, "k": 2, "c": 1.0, "s": 0.0, "gates": [{"kind": "x", "targets": [0]},
            {"kind": "cnot", "targets": [1], "controls": [0]}]}"#,
    );
    let art = d.join("clock.json");
    let out = qspace(&["reduce", "clock", "--circuit", &v, "--out", art.to_str().unwrap(), "--verify-oracle"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["details"]["lambda_min"].as_f64().unwrap() <= 1e-10);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&art).unwrap()).unwrap();
    assert_eq!(saved["meta"]["thresholds"]["type"], "min-eig");

    let walk = qspace(&["reduce", "walk", "--matrix", art.to_str().unwrap(), "--verify-oracle"]);
    assert_eq!(code(&walk), 0, "{}", String::from_utf8_lossy(&walk.stderr));
    assert_eq!(code(&qspace(&["reduce", "walk", "--circuit", &v])), 2);
}

#[test]
fn corpus_exit_codes() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let empty = qspace(&["corpus", root.join("empty.json").to_str().unwrap()]);
    assert_eq!(code(&empty), 0);
    let pv = qspace(&["corpus", root.join("promise-violation.json").to_str().unwrap()]);
    assert_eq!(code(&pv), 1);
    let d = scratch("corpus");
    let bad = put(&d, "bad.json", r#"{"entries": [{"criterion": "no-such-thing"}]}"#);
    assert_eq!(code(&qspace(&["corpus", &bad])), 2);
}

#[test]
fn same_seed_same_bytes() {
    let d = scratch("determinism");
    let spec = put(&d, "spec.json", r#"{"entries": [{"criterion": "matinv-oracle", "count": 3},
        {"criterion": "gap-amplification", "count": 2}]}"#);
    let runs: Vec<_> = (0..2)
        .map(|k| {
            let out = d.join(format!("run{k}"));
            let o = qspace(&["corpus", &spec, "--seed", "11", "--out", out.to_str().unwrap()]);
            (o.stdout, std::fs::read(out.join("corpus.csv")).unwrap())
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let id = put(&d, "id.json", IDENTITY);
    let a = qspace(&["invert", "--matrix", &id, "--s", "1", "--t", "1", "--a", "0.3", "--b", "0.6", "--seed", "5"]);
    let b = qspace(&["invert", "--matrix", &id, "--s", "1", "--t", "1", "--a", "0.3", "--b", "0.6", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}
