use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_frame-decomp"));
    cmd.env_remove("FRAME_DECOMP_TOL");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output", path.to_str().unwrap()]);
    let out = run(&full);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_shift_pair() {
    let out = run(&["gen", "--kind", "shift-pair", "--n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dim"], 9);
    assert_eq!(v["scalars"], "real");
    assert_eq!(v["vectors"].as_array().unwrap().len(), 8);
}

#[test]
fn gen_union_onb_is_reproducible() {
    let args = [
        "gen",
        "--kind",
        "union-onb",
        "--dim",
        "4",
        "--copies",
        "2",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json(&a)["vectors"].as_array().unwrap().len(), 8);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gen_infeasible_bessel_fails() {
    let out = run(&[
        "gen",
        "--kind",
        "random-bessel",
        "--dim",
        "4",
        "--n",
        "32",
        "--bessel",
        "2",
    ]);
    assert_ne!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn gen_missing_parameter_is_an_input_error() {
    let out = run(&["gen", "--kind", "shift-pair"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_onb_and_shift_pair() {
    let dir = TempDir::new().unwrap();
    let onb = gen(&dir, "onb.json", &["--kind", "union-onb", "--dim", "5"]);
    let v = json(&run(&["analyze", p(&onb)]));
    assert_eq!(v["report"], "spectral");
    assert!((v["frame_A"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["bessel_B"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let sp = gen(&dir, "sp.json", &["--kind", "shift-pair", "--n", "7"]);
    let v = json(&run(&["analyze", p(&sp)]));
    let expected = 1.0 + (std::f64::consts::PI / 8.0).cos();
    assert!((v["bessel_B"].as_f64().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn analyze_reads_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = bin()
        .args(["analyze", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"dim": 2, "scalars": "real", "vectors": [[1, 0], [0, 1]]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rank"], 2);
}

#[test]
fn analyze_complex_family() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "c.json",
        r#"{"dim": 2, "scalars": "complex", "vectors": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]}"#,
    );
    let v = json(&run(&["analyze", p(&f)]));
    assert!((v["riesz_lower"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn malformed_inputs_exit_2_without_output() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("out.json");
    for (name, text) in [
        ("broken.json", "{\"dim\": 2, \"vectors\": "),
        (
            "shape.json",
            r#"{"dim": 2, "scalars": "real", "vectors": [[1, 0, 0]]}"#,
        ),
        (
            "nan.json",
            r#"{"dim": 1, "scalars": "real", "vectors": [[NaN]]}"#,
        ),
    ] {
        let f = write(&dir, name, text);
        let out = run(&["analyze", p(&f), "--output", p(&out_path)]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(out.stdout.is_empty());
        assert!(!out_path.exists());
    }
}

#[test]
fn decompose_greedy_shift_pair() {
    let dir = TempDir::new().unwrap();
    let f = gen(&dir, "sp.json", &["--kind", "shift-pair", "--n", "64"]);
    let out = run(&[
        "decompose",
        p(&f),
        "--strategy",
        "greedy",
        "--epsilon",
        "0.01",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let odd: Vec<Value> = (1..=64).step_by(2).map(Value::from).collect();
    let even: Vec<Value> = (2..=64).step_by(2).map(Value::from).collect();
    assert_eq!(v["parts"][0].as_array().unwrap(), &odd);
    assert_eq!(v["parts"][1].as_array().unwrap(), &even);
    assert_eq!(v["energies"][0].as_f64(), Some(0.0));
}

#[test]
fn decompose_ordered_schedule_then_verify() {
    let dir = TempDir::new().unwrap();
    let f = gen(&dir, "sp.json", &["--kind", "shift-pair", "--n", "64"]);
    let r = dir.path().join("r.json");
    let out = run(&["decompose", p(&f), "--epsilon", "0.01", "--output", p(&r)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&r).unwrap()).unwrap();
    let mut expected = 0.01;
    for entry in v["ledger"].as_array().unwrap() {
        expected /= 2.0;
        assert_eq!(entry["threshold"].as_f64(), Some(expected));
        assert!(entry["achieved"].as_f64().unwrap() < expected);
    }
    for e in v["energies"].as_array().unwrap() {
        assert!(e.as_f64().unwrap() < 0.01);
    }
    let out = run(&["verify", p(&f), p(&r)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ok"], true);
}

#[test]
fn decompose_rejects_nonpositive_epsilon() {
    let dir = TempDir::new().unwrap();
    let f = gen(&dir, "sp.json", &["--kind", "shift-pair", "--n", "4"]);
    for eps in ["0", "-0.5"] {
        let out = run(&["decompose", p(&f), "--epsilon", eps]);
        assert_eq!(out.status.code(), Some(3), "ε = {eps}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn riesz_scaled_on_dependent_family_names_precondition() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        &dir,
        "u.json",
        &["--kind", "union-onb", "--dim", "3", "--copies", "2"],
    );
    let out = run(&[
        "decompose",
        p(&f),
        "--strategy",
        "riesz-scaled",
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("linearly"), "{err}");
}

#[test]
fn non_unit_family_needs_override() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "f.json",
        r#"{"dim": 2, "scalars": "real", "vectors": [[2, 0], [1, 1]]}"#,
    );
    let out = run(&["decompose", p(&f), "--epsilon", "0.1"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["decompose", p(&f), "--epsilon", "0.1", "--allow-non-unit"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn greedy_start_index_is_a_label() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "f.json",
        r#"{"dim": 2, "scalars": "real", "vectors": [[1, 0], [0, 1]], "labels": [10, 20]}"#,
    );
    let out = run(&[
        "decompose",
        p(&f),
        "--epsilon",
        "0.1",
        "--strategy",
        "greedy",
        "--start-index",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["start_index"], 20);
    let out = run(&[
        "decompose",
        p(&f),
        "--epsilon",
        "0.1",
        "--strategy",
        "greedy",
        "--start-index",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn decomposed(dir: &TempDir) -> (PathBuf, Value) {
    let f = gen(dir, "sp.json", &["--kind", "shift-pair", "--n", "16"]);
    let out = run(&["decompose", p(&f), "--epsilon", "0.05"]);
    assert_eq!(out.status.code(), Some(0));
    (f, json(&out))
}

#[test]
fn tampered_perturbed_vector_fails_verification() {
    let dir = TempDir::new().unwrap();
    let (f, mut v) = decomposed(&dir);
    let x = v["perturbed"][0]["vectors"][1][0].as_f64().unwrap();
    v["perturbed"][0]["vectors"][1][0] = Value::from(x + 0.25);
    let r = write(&dir, "r.json", &v.to_string());
    let out = run(&["verify", p(&f), p(&r)]);
    assert_eq!(out.status.code(), Some(1));
    let check = json(&out)["violation"]["check"]
        .as_str()
        .unwrap()
        .to_string();
    assert!(
        ["block-orthogonality", "span", "energy", "perturbed-vector"].contains(&check.as_str()),
        "{check}"
    );
}

#[test]
fn tampered_threshold_names_the_ledger_entry() {
    let dir = TempDir::new().unwrap();
    let (f, mut v) = decomposed(&dir);
    let t = v["ledger"][2]["threshold"].as_f64().unwrap();
    v["ledger"][2]["threshold"] = Value::from(t / 4.0);
    let r = write(&dir, "r.json", &v.to_string());
    let out = run(&["verify", p(&f), p(&r)]);
    assert_eq!(out.status.code(), Some(1));
    let violation = &json(&out)["violation"];
    assert_eq!(violation["check"], "threshold-schedule");
    assert_eq!(violation["entry"], 2);
}

#[test]
fn verify_against_the_wrong_family_is_a_label_mismatch() {
    let dir = TempDir::new().unwrap();
    let (_, v) = decomposed(&dir);
    let other = gen(&dir, "small.json", &["--kind", "shift-pair", "--n", "8"]);
    let r = write(&dir, "r.json", &v.to_string());
    let out = run(&["verify", p(&other), p(&r)]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn certify_shift_pair_blocks() {
    let dir = TempDir::new().unwrap();
    let f = gen(&dir, "sp.json", &["--kind", "shift-pair", "--n", "8"]);
    let out = run(&[
        "certify",
        p(&f),
        "--blocks",
        "1-2;3-4;5-6;7-8",
        "--epsilon",
        "0.01",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["crossing_index"], 2);
    assert!((v["lhs"].as_f64().unwrap() - 2f64.sqrt() * 0.9).abs() < 1e-12);
    assert!((v["rhs"].as_f64().unwrap() - 1.2).abs() < 1e-12);

    let out = run(&[
        "certify",
        p(&f),
        "--blocks",
        "1-2;3-4;5-6;7-8",
        "--epsilon",
        "0.25",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], false);

    let out = run(&["certify", p(&f), "--blocks", "1-8", "--epsilon", "0.01"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn tolerance_override_from_environment() {
    let dir = TempDir::new().unwrap();
    let f = gen(&dir, "sp.json", &["--kind", "shift-pair", "--n", "4"]);
    let out = bin()
        .args(["analyze", p(&f)])
        .env("FRAME_DECOMP_TOL", "ortho_tol=bogus")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["analyze", p(&f)])
        .env("FRAME_DECOMP_TOL", "1e-8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
