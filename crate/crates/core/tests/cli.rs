use std::process::{Command, Output};

fn zeckmob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeckmob"))
        .args(args)
        .env_remove("ZECKMOB_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

#[test]
fn sdigits_plain() {
    let out = zeckmob(&["zeck", "sdigits", "17"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "3");
}

#[test]
fn parity_plain() {
    assert_eq!(stdout(&zeckmob(&["seq", "parity", "--count", "8"])), "0 1 1 1 0 1 0 0");
}

#[test]
fn encode_formats() {
    assert_eq!(stdout(&zeckmob(&["zeck", "encode", "17"])), "F_7 + F_4 + F_2");
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&zeckmob(&["--format", "json", "zeck", "encode", "17"]))).unwrap();
    assert_eq!(json["indices"], serde_json::json!([7, 4, 2]));
    assert_eq!(stdout(&zeckmob(&["zeck", "encode", "17", "--format", "csv"])), "index\n7\n4\n2");
}

#[test]
fn identity_exit_zero() {
    let out = zeckmob(&["genfun", "identity", "--p", "2", "--q", "3", "--K", "25", "--z", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("discrepancy 0"));
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        &["zeck", "decode", "3", "2"][..],
        &["zeck", "frobnicate"],
        &["qa", "check", "--p", "3", "--q", "2"],
        &["genfun", "phir", "--r", "1"],
        &["corr", "pq", "--N", "100", "--checkpoints", "50,20"],
        &["--format", "xml", "zeck", "sdigits", "1"],
        &["zeck", "sdigits", "1", "--output", "/nonexistent/dir/out.txt"],
    ] {
        assert_eq!(zeckmob(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn verification_failure_exits_two() {
    // below the analytic radius the additivity checks find violations
    let out = zeckmob(&["qa", "check", "--r", "1", "--bound", "2000"]);
    assert_eq!(out.status.code(), Some(2));
    let out = zeckmob(&["genfun", "zerofree", "--anchor-tol", "0.001"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_file_and_workers_env() {
    let dir = std::env::temp_dir().join(format!("zeckmob-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("blocks.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_zeckmob"))
        .args(["corr", "pq", "--N", "100000", "--format", "csv", "--output"])
        .arg(&path)
        .env("ZECKMOB_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("k_or_checkpoint,sum,abs_sum,normalized\n"));
    let fit = zeckmob(&["corr", "fit", "--input", path.to_str().unwrap()]);
    assert_eq!(fit.status.code(), Some(0));
    assert!(stdout(&fit).starts_with("fitted exponent"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seeded_runs_are_reproducible() {
    let args = ["--seed", "11", "--format", "json", "corr", "theorem1", "--N", "20000"];
    assert_eq!(stdout(&zeckmob(&args)), stdout(&zeckmob(&args)));
}
