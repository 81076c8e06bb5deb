//! Black-box tests of the `cohfrac` binary.

use std::path::Path;
use std::process::{Command, Output};

fn cohfrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohfrac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        stdout(out),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn state_gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = cohfrac(&[
            "state", "gen", "--kind", "random", "--d", "4", "--seed", "11", "--out",
            path.to_str().unwrap(),
        ]);
        assert_success(&out);
    }
    assert_eq!(
        std::fs::read_to_string(&a).unwrap(),
        std::fs::read_to_string(&b).unwrap()
    );
}

#[test]
fn measure_qubit_closed_forms() {
    // rho = [[0.5, 0.3], [0.3, 0.5]]: cf = 0.8, cr = 0.6, cl1 = 0.6
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("qubit.json");
    write_qubit(&path, 0.3);
    let out = cohfrac(&[
        "measure",
        "--input",
        path.to_str().unwrap(),
        "--measures",
        "cf,cr,cl1",
    ]);
    assert_success(&out);
    let text = stdout(&out);
    assert!(text.contains("cl1 = 6.00000000000e-1"), "{text}");

    // last line is a JSON object with the solver-accurate values
    let json: serde_json::Value =
        serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert!((json["cf"].as_f64().unwrap() - 0.8).abs() < 1e-8);
    assert!((json["cr"].as_f64().unwrap() - 0.6).abs() < 1e-7);
}

#[test]
fn measure_accepts_pure_state_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.json");
    let out = cohfrac(&[
        "state", "gen", "--kind", "pure", "--d", "3", "--out", path.to_str().unwrap(),
    ]);
    assert_success(&out);
    let out = cohfrac(&["measure", "--input", path.to_str().unwrap(), "--measures", "cf"]);
    assert_success(&out);
    let json: serde_json::Value =
        serde_json::from_str(stdout(&out).lines().last().unwrap()).unwrap();
    assert!((json["cf"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn simulate_emits_fixed_header_and_is_deterministic() {
    let run = || {
        let out = cohfrac(&[
            "simulate", "--dims", "2,3", "--samples", "4", "--seed", "5",
        ]);
        assert_success(&out);
        stdout(&out)
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
    assert!(a.starts_with("dim,sample_index,cf,cr_bar,cl1_bar,gap,error\n"), "{a}");
    // header + 2 dims x 4 samples
    assert_eq!(a.lines().count(), 9);
}

#[test]
fn verify_suite_prints_check_lines() {
    let out = cohfrac(&[
        "verify", "--suite", "theorem3", "--samples", "10", "--seed", "3",
    ]);
    assert_success(&out);
    let text = stdout(&out);
    assert!(text.contains("[theorem3] cf_equals_cr_bar"), "{text}");
    assert!(text.contains("-> pass"), "{text}");
}

#[test]
fn invalid_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"dim\": 2}").unwrap();
    let out = cohfrac(&["measure", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = cohfrac(&["measure", "--input", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_solver_flags_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("qubit.json");
    write_qubit(&path, 0.1);
    let out = cohfrac(&[
        "measure", "--input", path.to_str().unwrap(), "--gap-tol", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn non_psd_matrix_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // off-diagonal too large for the diagonal: not PSD
    write_qubit(&path, 0.9);
    let out = cohfrac(&["measure", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

fn write_qubit(path: &Path, r: f64) {
    let body = serde_json::json!({
        "dim": 2,
        "re": [0.5, r, r, 0.5],
        "im": [0.0, 0.0, 0.0, 0.0],
    });
    std::fs::write(path, serde_json::to_string(&body).unwrap()).unwrap();
}
