use std::process::{Command, Output};

fn qlang(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlang")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn scenario_json_goes_to_stdout() {
    let out = qlang(&["scenario", "hardy"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["scenario"], "hardy");
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(out.stdout.ends_with(b"\n"));
}

#[test]
fn csv_files_land_in_the_out_directory() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("wheeler");
    let out = qlang(&["scenario", "wheeler", "--csv", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let body = std::fs::read_to_string(target.join("phi_o_f.csv")).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "bin,probability");
    assert!(lines[1].starts_with("1,4.99999999999999"));
    assert!(lines.last().unwrap().starts_with("none,"));
}

#[test]
fn csv_to_stdout_is_sectioned() {
    let out = qlang(&["scenario", "three-boxes", "--csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# "));
    assert_eq!(text.matches("bin,probability").count(), 2);
}

#[test]
fn eraser_takes_complex_amplitudes() {
    let out = qlang(&["scenario", "eraser", "--alpha1", "0.6,0", "--alpha2", "0,-0.8"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["parameters"]["alpha2"]["im"].as_f64().unwrap(), -0.8);
}

#[test]
fn validation_errors_exit_with_two() {
    assert_eq!(code(&qlang(&["scenario", "nope"])), 2);
    assert_eq!(code(&qlang(&["scenario", "eraser", "--alpha1", "1,0", "--alpha2", "1,0"])), 2);
    assert_eq!(code(&qlang(&["scenario", "hardy", "--alpha1", "1,0", "--alpha2", "0,0"])), 2);
    assert_eq!(code(&qlang(&["scenario", "hardy", "--json", "--csv"])), 2);
    assert_eq!(code(&qlang(&["doubleslit", "--preset", "compact", "--sigma", "0.1"])), 2);
}

#[test]
fn numerical_errors_exit_with_three() {
    let out = qlang(&["doubleslit", "--preset", "compact", "--dt", "0.05"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn io_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no").join("such").join("file.json");
    assert_eq!(code(&qlang(&["scenario", "wheeler", "--out", missing.to_str().unwrap()])), 1);
}

#[test]
fn doubleslit_single_branch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b1.json");
    let out = qlang(&[
        "doubleslit",
        "--preset",
        "compact",
        "--branch",
        "1",
        "--shots",
        "1000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["pmfs"].as_array().unwrap().len(), 1);
    assert_eq!(v["parameters"]["shots"], 1000);
    assert!(v["metadata"]["histograms"].is_array());
}
