use std::path::Path;
use std::process::{Command, Output};

fn wiener(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wiener")).args(args).output().unwrap()
}

fn run_in(dir: &Path, sub: &str, config: Option<&str>, extra: &[&str]) -> Output {
    let out = dir.join("out");
    let mut args = vec![sub.to_string(), "--out".into(), out.display().to_string()];
    if let Some(text) = config {
        let path = dir.join("config.toml");
        std::fs::write(&path, text).unwrap();
        args.extend(["--config".into(), path.display().to_string()]);
    }
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    wiener(&refs)
}

#[test]
fn every_subcommand_passes_with_defaults() {
    for sub in [
        "axioms",
        "covariance-check",
        "symmetry-check",
        "invert",
        "decay",
        "ideal-approx",
        "contour",
        "kernel-io",
    ] {
        let dir = tempfile::tempdir().unwrap();
        let out = run_in(dir.path(), sub, Some("trials = 5\n"), &[]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{sub}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let table = std::fs::read_to_string(dir.path().join("out/checks.txt")).unwrap();
        assert!(!table.is_empty() && !table.contains("FAIL"), "{sub}:\n{table}");
    }
}

#[test]
fn reports_are_byte_identical_for_a_fixed_seed() {
    for sub in ["axioms", "decay", "kernel-io"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let cfg = "trials = 5\n";
        assert!(run_in(a.path(), sub, Some(cfg), &["--seed", "99"]).status.success());
        assert!(run_in(b.path(), sub, Some(cfg), &["--seed", "99"]).status.success());
        let mut names: Vec<_> = std::fs::read_dir(a.path().join("out"))
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            let x = std::fs::read(a.path().join("out").join(&name)).unwrap();
            let y = std::fs::read(b.path().join("out").join(&name)).unwrap();
            assert_eq!(x, y, "{sub}: {name:?} differs");
        }
    }
}

#[test]
fn decay_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), "decay", None, &[]).status.success());
    let csv = std::fs::read_to_string(dir.path().join("out/decay.csv")).unwrap();
    assert!(csv.starts_with("radius,word_length,envelope_value"));
    let rows = wiener_kernels::io::read_decay_csv(&csv).unwrap();
    let r1 = rows.iter().find(|r| r.radius == 40 && r.word_length == 1).unwrap();
    assert!((r1.envelope_value - 0.5).abs() <= 1e-12);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["stabilized"], true);
    let rate = summary["fitted_rate"].as_f64().unwrap();
    assert!((rate - 0.5f64.ln()).abs() <= 0.02);
}

#[test]
fn failed_check_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // the shift preset decays at ln 0.5, far from the expected rate
    let out = run_in(dir.path(), "decay", Some("expected_rate = -5.0\n"), &[]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "axioms", Some("group = \"Q^2\"\n"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_in(dir.path(), "axioms", Some("no_such_field = 1\n"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("nope.toml");
    let out = wiener(&[
        "axioms",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_abort_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // 1 + (−1)·1 is the zero operator
    let cfg = "group = \"Z^1\"\ndim = 1\n[kernel]\nsource = \"scalar\"\nvalue = -1.0\nwindow = 30\n[inversion]\nradii = [5, 10]\n";
    let out = run_in(dir.path(), "invert", Some(cfg), &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not invertible"));
}

#[test]
fn kernel_io_reads_a_written_kernel() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), "kernel-io", None, &[]).status.success());
    let written = dir.path().join("out/kernel.json");
    let k = wiener_kernels::io::read_kernel(&written).unwrap();
    let second = tempfile::tempdir().unwrap();
    let cfg = format!("input = {:?}\n", written.display().to_string());
    assert!(run_in(second.path(), "kernel-io", Some(&cfg), &[]).status.success());
    assert_eq!(
        wiener_kernels::io::read_kernel(&second.path().join("out/kernel.json")).unwrap(),
        k
    );
}
