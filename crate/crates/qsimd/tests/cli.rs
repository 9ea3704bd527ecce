//! End-to-end checks of the benchmark binary: flags, output formats, exit
//! codes.

use std::process::Command;

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qsimd-bench"))
}

#[test]
fn gate_bench_emits_csv() {
    let out = bench()
        .args([
            "--bench", "gate", "--gate", "h", "--qubits", "5", "--target", "1", "--kernel",
            "opt", "--threads", "2", "--reps", "10",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scenario,n,variant,policy,threads,pinned,reps,min_ns,mean_ns"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("gate:h,5,opt,default,2,"), "{row}");
    assert!(lines.next().is_none());
}

#[test]
fn qubit_sweep_yields_one_row_per_size() {
    let out = bench()
        .args([
            "--bench", "rqc", "--qubits", "4..6", "--layers", "2", "--seed", "7", "--kernel",
            "scalar", "--reps", "3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4, "{text}");
}

#[test]
fn json_output_carries_placement_and_config() {
    let out = bench()
        .args([
            "--bench", "qft", "--qft", "blocked", "--block-factor", "16", "--qubits", "6",
            "--format", "json", "--reps", "10",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rec = &parsed[0];
    assert_eq!(rec["scenario"], "qft:blocked16");
    assert_eq!(rec["reps"], 10);
    assert_eq!(rec["all_reps_ns"].as_array().unwrap().len(), 10);
    assert!(rec["placement"]["rounded_bytes"].as_u64().unwrap() >= (16 << 6));
    assert!(rec["config"]["unroll"].as_u64().unwrap() >= 1);
    assert!(rec["config"]["isa"].is_string());
}

#[test]
fn invalid_arguments_exit_2() {
    let out = bench().args(["--bench", "gate"]).output().unwrap(); // missing --qubits
    assert_eq!(out.status.code(), Some(2));
    let out = bench()
        .args(["--bench", "gate", "--qubits", "zero"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bench()
        .args(["--bench", "gate", "--gate", "cnot", "--qubits", "5"])
        .output()
        .unwrap();
    // cnot without --control is a semantic argument error.
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn allocation_failure_exits_3() {
    let out = bench()
        .args(["--bench", "gate", "--gate", "h", "--qubits", "45", "--target", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn out_file_and_env_overrides() {
    let dir = std::env::temp_dir().join(format!("qsimd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("result.csv");
    let out = bench()
        .args([
            "--bench", "gate", "--gate", "y", "--qubits", "4", "--target", "0", "--out",
            path.to_str().unwrap(),
        ])
        .env("PREFETCH_AHEAD", "64")
        .env("UNROLL", "8")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("scenario,"));
    let _ = std::fs::remove_dir_all(&dir);

    // Bad env values are invalid arguments.
    let out = bench()
        .args(["--bench", "gate", "--gate", "h", "--qubits", "4"])
        .env("UNROLL", "banana")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
