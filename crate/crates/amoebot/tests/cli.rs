//! End-to-end checks of the `amoebot` binary: exit codes, file outputs, and
//! the reproducibility echo line.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn amoebot(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amoebot"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn generate_run_check_flow() {
    let dir = tempfile::tempdir().unwrap();
    let out = amoebot(
        &[
            "generate",
            "--shape",
            "line",
            "--n",
            "3",
            "--seed",
            "7",
            "-o",
            "line3.cfg",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let text = fs::read_to_string(dir.path().join("line3.cfg")).unwrap();
    assert!(text.starts_with("amoebot-config v1"));
    assert_eq!(text.lines().count(), 4);

    let out = amoebot(
        &[
            "run",
            "-i",
            "line3.cfg",
            "--seed",
            "1",
            "--trace",
            "t.log",
            "--metrics",
            "m.csv",
        ],
        dir.path(),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("--seed 1"), "echo line must pin the seed");
    assert!(stdout.contains("leader"));

    let trace = fs::read_to_string(dir.path().join("t.log")).unwrap();
    let leaders = trace.lines().filter(|l| l.contains(" LEADER ")).count();
    assert_eq!(leaders, 1, "exactly one LEADER event per run");
    for line in trace.lines() {
        // round activation x y EVENT payload...
        let fields: Vec<&str> = line.split_whitespace().collect();
        assert!(fields.len() >= 5, "short trace line: {line}");
        assert!(fields[0].parse::<u64>().is_ok());
        assert!(fields[1].parse::<u64>().is_ok());
        assert!(fields[2].parse::<i32>().is_ok());
        assert!(fields[3].parse::<i32>().is_ok());
    }

    let metrics = fs::read_to_string(dir.path().join("m.csv")).unwrap();
    let mut lines = metrics.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,L,C,D,rounds,activations,success,seed,max_state_bytes"
    );
    assert_eq!(lines.count(), 1);

    let out = amoebot(&["check", "-i", "line3.cfg"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("n=3 L=4 C=3 D=2"));
    assert!(stdout.contains("L >= sqrt(n)): OK"));
}

#[test]
fn same_seed_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    amoebot(
        &[
            "generate",
            "--shape",
            "parallelogram",
            "--w",
            "4",
            "--h",
            "4",
            "-o",
            "sq.cfg",
        ],
        dir.path(),
    );
    let a = amoebot(&["run", "-i", "sq.cfg", "--seed", "99"], dir.path());
    let b = amoebot(&["run", "-i", "sq.cfg", "--seed", "99"], dir.path());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = amoebot(
        &[
            "generate", "--shape", "annulus", "--outer", "1", "--hole", "1", "-o", "x.cfg",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    fs::write(dir.path().join("bad.cfg"), "amoebot-config v1\n0 0\n5 5\n").unwrap();
    let out = amoebot(&["check", "-i", "bad.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    fs::write(dir.path().join("ok.cfg"), "amoebot-config v1\n0 0\n").unwrap();
    let out = amoebot(
        &["run", "-i", "ok.cfg", "--radix", "1", "--seed", "1"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(2),
        "degenerate radix needs --unsafe-hooks"
    );
}

#[test]
fn forced_ties_exit_3_unless_almost_sure() {
    let dir = tempfile::tempdir().unwrap();
    amoebot(
        &[
            "generate",
            "--shape",
            "parallelogram",
            "--w",
            "3",
            "--h",
            "3",
            "-o",
            "sq.cfg",
        ],
        dir.path(),
    );
    let base = amoebot(
        &[
            "run",
            "-i",
            "sq.cfg",
            "--seed",
            "5",
            "--radix",
            "1",
            "--coin",
            "all-heads",
            "--unsafe-hooks",
            "--max-rounds",
            "3000",
        ],
        dir.path(),
    );
    assert_eq!(base.status.code(), Some(3));

    let variant = amoebot(
        &[
            "run",
            "-i",
            "sq.cfg",
            "--seed",
            "5",
            "--radix",
            "1",
            "--coin",
            "all-heads",
            "--unsafe-hooks",
            "--max-rounds",
            "3000",
            "--almost-sure",
        ],
        dir.path(),
    );
    assert_eq!(variant.status.code(), Some(0), "{variant:?}");
}

#[test]
fn bench_zero_trials_prints_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = amoebot(
        &[
            "bench", "--shape", "line", "--sizes", "4,8", "--trials", "0",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(
        stdout.trim(),
        "n,L,C,D,rounds,activations,success,seed,max_state_bytes"
    );
}

#[test]
fn bench_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = amoebot(
        &[
            "bench",
            "--shape",
            "parallelogram",
            "--sizes",
            "4,6",
            "--trials",
            "3",
            "--seed",
            "2",
            "-o",
            "bench.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("median rounds/L"));
    let csv = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7); // header + 2 sizes x 3 trials
}
