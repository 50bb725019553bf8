//! Exit-code contract: 0 success, 2 config error, 3 numeric guard,
//! 4 hypothesis violation; identical outputs across worker counts.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_recurlab"))
}

fn tmp_dir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("recurlab_cli_{name}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn analyze_builtin_signal_succeeds() {
    let out = tmp_dir("analyze");
    let status = bin()
        .args(["analyze", "sin", "--ladder-depth", "1"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("analyze_sin.report.json").exists());
}

#[test]
fn malformed_config_exits_2() {
    let out = tmp_dir("bad_config");
    let status = bin()
        .args(["analyze", r#"{"signal": "sin", "bogus": 1}"#])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    let status = bin()
        .args(["verify", "not_an_experiment"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn numeric_guard_exits_3() {
    let out = tmp_dir("guard");
    let doc = r#"{"signal":"sin","scan":{"eps":-1.0,"window":{"interval":{"lo":-2,"hi":2,"sample_step":0.01}},"range":[0,10]}}"#;
    let status = bin().args(["scan", doc]).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(3));

    let status = bin()
        .args(["analyze", "sin", "--step", "-0.5"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn non_hyperbolic_green_solve_exits_4() {
    let out = tmp_dir("hypothesis");
    let doc = r#"{"system":{"ode":{"coeffs":[[[[1.0,0.0]]],[[[0.0,0.0]]]]}},"forcing":"sin","horizon":5}"#;
    let status = bin().args(["solve", doc]).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(4));
}

#[test]
fn scan_outputs_are_worker_independent() {
    let doc = r#"{"signal":"sin","scan":{"eps":0.05,"window":{"interval":{"lo":-2,"hi":2,"sample_step":0.01}},"range":[0,60]}}"#;
    let out1 = tmp_dir("w1");
    let out4 = tmp_dir("w4");
    for (workers, out) in [("1", &out1), ("4", &out4)] {
        let status = bin()
            .args(["scan", doc, "--workers", workers])
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = std::fs::read(out1.join("scan.csv")).unwrap();
    let b = std::fs::read(out4.join("scan.csv")).unwrap();
    assert_eq!(a, b);
    let a = std::fs::read(out1.join("members.csv")).unwrap();
    let b = std::fs::read(out4.join("members.csv")).unwrap();
    assert_eq!(a, b);
}
