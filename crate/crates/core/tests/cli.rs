use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_wompolar");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("spawn wompolar")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_exact_full_rate_selects_four_indices() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("set.json");
    let out = run(&[
        "construct",
        "--n",
        "3",
        "--s",
        "0.5",
        "--t",
        "0.5",
        "--method",
        "exact",
        "--mode",
        "rate",
        "--target",
        "1.0",
        "--out",
        path(&set),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let loaded = wompolar::HighEntropySet::load(&set).unwrap();
    assert_eq!(loaded.len, 8);
    assert_eq!(loaded.message_len(), 4);
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(
        summary.contains("M=4") && summary.contains("rate/capacity=1"),
        "{summary}"
    );
}

#[test]
fn construct_without_out_writes_json_to_stdout() {
    let out = run(&[
        "construct",
        "--n",
        "2",
        "--s",
        "0.5",
        "--t",
        "0.5",
        "--method",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let set = wompolar::HighEntropySet::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(set.len, 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("N=4"));
}

#[test]
fn argument_errors_exit_two() {
    assert_eq!(
        run(&["construct", "--n", "3", "--t", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["construct", "--n", "3", "--s", "1.0", "--t", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "construct",
            "--n",
            "4",
            "--s",
            "0.5",
            "--t",
            "0.5",
            "--method",
            "exact"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "construct",
            "--n",
            "3",
            "--s",
            "0.5",
            "--t",
            "0.5",
            "--mode",
            "rate"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(run(&["validate", "--max-n", "4"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn construct_is_byte_identical() {
    let args = [
        "construct",
        "--n",
        "6",
        "--s",
        "0.3",
        "--t",
        "0.6",
        "--samples",
        "3000",
        "--seed",
        "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    let c = run(&[
        "construct",
        "--n",
        "6",
        "--s",
        "0.3",
        "--t",
        "0.6",
        "--samples",
        "3000",
        "--seed",
        "12",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

fn exact_set(dir: &Path) -> std::path::PathBuf {
    let set = dir.join("set.json");
    let out = run(&[
        "construct",
        "--n",
        "3",
        "--s",
        "0.5",
        "--t",
        "0.5",
        "--method",
        "exact",
        "--mode",
        "rate",
        "--target",
        "1.0",
        "--out",
        path(&set),
    ]);
    assert!(out.status.success());
    set
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let set = exact_set(dir.path());
    let state = dir.path().join("y.txt");
    let msg = dir.path().join("v.txt");
    let cw = dir.path().join("x.txt");
    let back = dir.path().join("w.txt");
    fs::write(&state, "11111111\n").unwrap();
    for v in ["0000", "1010", "0111", "1111"] {
        fs::write(&msg, format!("{v}\n")).unwrap();
        let out = run(&[
            "encode",
            "--set",
            path(&set),
            "--state",
            path(&state),
            "--message",
            path(&msg),
            "--out",
            path(&cw),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let out = run(&[
            "decode",
            "--set",
            path(&set),
            "--codeword",
            path(&cw),
            "--out",
            path(&back),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(fs::read_to_string(&back).unwrap().trim(), v);
    }
}

#[test]
fn encode_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let set = exact_set(dir.path());
    let state = dir.path().join("y.txt");
    let msg = dir.path().join("v.txt");
    fs::write(&state, "00000000\n").unwrap();
    fs::write(&msg, "1010\n").unwrap();
    let out = run(&[
        "encode",
        "--set",
        path(&set),
        "--state",
        path(&state),
        "--message",
        path(&msg),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("zero_probability_event"), "{err}");
}

#[test]
fn dimension_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let set = exact_set(dir.path());
    let cw = dir.path().join("x.txt");
    fs::write(&cw, "101\n").unwrap();
    let out = run(&["decode", "--set", path(&set), "--codeword", path(&cw)]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    let out = run(&["decode", "--set", path(&missing), "--codeword", path(&cw)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decode_rejects_seed() {
    let dir = tempfile::tempdir().unwrap();
    let set = exact_set(dir.path());
    let cw = dir.path().join("x.txt");
    fs::write(&cw, "11111111\n").unwrap();
    let out = run(&[
        "decode",
        "--set",
        path(&set),
        "--codeword",
        path(&cw),
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_passes() {
    let out = run(&["validate", "--max-n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 20);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn bench_csv_is_deterministic() {
    let args = [
        "bench",
        "--n-list",
        "4,6",
        "--trials",
        "200",
        "--samples",
        "1000",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 12);
    assert_eq!(header, wompolar::sim::CSV_HEADER);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("16,") && rows[1].starts_with("64,"));
    assert!(rows
        .iter()
        .all(|r| r.ends_with(',') && r.split(',').count() == 12));
}

#[test]
fn bench_json_and_timing() {
    let out = run(&[
        "bench", "--n-list", "4", "--trials", "50", "--format", "json", "--timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v[0]["seconds"].is_number(), "{v}");
    let out = run(&[
        "bench", "--n-list", "4", "--trials", "50", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v[0]["seconds"].is_null());
}

#[test]
fn multiwrite_reports_one_row_per_write() {
    let out = run(&[
        "multiwrite",
        "--schedule",
        "0.5,0.4",
        "--n",
        "5",
        "--trials",
        "50",
        "--samples",
        "500",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 3);
}
