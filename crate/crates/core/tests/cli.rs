use std::path::Path;
use std::process::{Command, Output};

fn btq(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_btq"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("BTQ_THREADS", t);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ktable_prints_five_passes() {
    let o = btq(&["ktable", "--n", "1", "--weights", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS K[")).count(), 5);
}

#[test]
fn spectrum_line() {
    let o = btq(&["spectrum", "--n", "2", "--weights", "2,6", "--cutoff", "10"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("0, 4, 8"));
}

#[test]
fn commutator_sweep_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = btq(&["sphere-commutator", "--f", "x1", "--g", "x2", "--p", "8:128", "--out", out], None);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("results.json")).unwrap()).unwrap();
    assert_eq!(json["experiment"], "sphere-commutator");
    assert_eq!(json["pass"], true);
    assert!(json["fit"]["rate"].as_f64().unwrap() >= 1.9);
    assert_eq!(json["params"]["f"], "x1");
    assert_eq!(json["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(btq(&["sphere-norm", "--f", "x4"], None).status.code(), Some(2));
    assert_eq!(btq(&["ktable", "--p", "8"], None).status.code(), Some(2));
    assert_eq!(btq(&["sphere-norm", "--p", "8:100"], None).status.code(), Some(2));
    assert_eq!(btq(&[], None).status.code(), Some(2));
    // a rate the residual cannot reach is an assertion failure
    let o = btq(&["sphere-commutator", "--rate-min", "2.5"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rate"));
    let bad = btq(&["orbifold-commutator", "--k", "3", "--g", "x1"], None);
    assert_eq!(bad.status.code(), Some(2));
}

fn run_to(dir: &Path, args: &[&str], threads: &str) -> Vec<u8> {
    let mut full: Vec<&str> = args.to_vec();
    let out = dir.to_str().unwrap();
    full.extend(["--out", out]);
    assert_eq!(btq(&full, Some(threads)).status.code(), Some(0));
    std::fs::read(dir.join("results.json")).unwrap()
}

#[test]
fn results_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for args in [&["sphere-norm", "--f", "x1"][..], &["bergman-diag", "--seed", "4"][..], &["c1-identity", "--n", "2", "--trials", "20"][..]] {
        let first = run_to(a.path(), args, "1");
        let second = run_to(b.path(), args, "4");
        assert_eq!(first, second, "{args:?}");
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("out");
    std::fs::write(
        &cfg,
        format!(r#"{{"experiment": "orbifold-bergman", "params": {{"k": 3, "p": 64}}, "out": {:?}, "oracle": true}}"#, out.to_str().unwrap()),
    )
    .unwrap();
    let o = btq(&["--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    assert!(json["oracle"].as_array().is_some_and(|a| !a.is_empty()));
    assert_eq!(json["params"]["k"], 3);
    let o = btq(&["--config", cfg.to_str().unwrap(), "spectrum"], None);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, r#"{"experiment": "ktable", "params": {"n": 1}, "extra": 1}"#).unwrap();
    assert_eq!(btq(&["--config", cfg.to_str().unwrap()], None).status.code(), Some(2));
}
