use std::process::{Command, Output};

fn qsdistill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsdistill")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qsdistill(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn field(csv: &str, row: usize, column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == column).unwrap();
    lines.nth(row).unwrap().split(',').nth(col).unwrap().to_owned()
}

fn num(csv: &str, row: usize, column: &str) -> f64 {
    field(csv, row, column).parse().unwrap()
}

#[test]
fn fig1_at_one_half() {
    let csv = stdout(&["fig1", "--points", "10"]);
    assert_eq!(csv.lines().count(), 10);
    assert_eq!(field(&csv, 4, "p1"), "5.00000000000e-1");
    assert_eq!(field(&csv, 4, "c_distilled"), "5.00000000000e-1");
}

#[test]
fn fig2_minimum_of_both_policy() {
    let csv = stdout(&["fig2", "--points", "20"]);
    let min = (0..19).map(|i| num(&csv, i, "p_both")).fold(f64::INFINITY, f64::min);
    assert_eq!(min, 0.5);
}

#[test]
fn fig3_starts_at_the_singlet() {
    let csv = stdout(&["fig3", "--points", "5", "--tmax", "2"]);
    assert_eq!(num(&csv, 0, "p_success"), 0.5);
    assert_eq!(num(&csv, 0, "c_undistilled"), 1.0);
}

#[test]
fn distill_vacuum_keeps_the_singlet() {
    let csv = stdout(&["distill", "--tmax", "1", "--policy", "strict-pm", "--not", "ancilla", "--sz"]);
    let last = csv.lines().count() - 2;
    assert_eq!(field(&csv, last, "nearest_bell"), "phi-");
    assert!((num(&csv, last, "prob") - (-2.0f64).exp() / 2.0).abs() < 1e-11);
    assert!((num(&csv, last, "fidelity") - 1.0).abs() < 1e-11);
}

#[test]
fn classify_rank2() {
    let csv = stdout(&["classify", "--p1", "0.5"]);
    assert_eq!(csv.lines().nth(1).unwrap(), "rank2(p1=0.5),Case1Rank2,NonQuasiSeparable,none");
}

#[test]
fn evolve_writes_to_a_file() {
    let dir = std::env::temp_dir().join(format!("qsdistill-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("evolve.csv");
    let out = qsdistill(&["evolve", "--points", "3", "--tmax", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.ends_with('\n'));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn audit_exits_zero_and_reports() {
    let out = qsdistill(&["audit", "--points", "4", "--tmax", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("quarter-root formula vs Wootters"));
}

#[test]
fn usage_errors_exit_nonzero() {
    for args in [
        &["fig1", "--points", "1"][..],
        &["fig9"],
        &["distill", "--p1", "1.5"],
        &["fig3", "--nbar", "-0.1"],
        &["evolve", "--dt", "0"],
        &["fig1", "--policy", "sometimes"],
        &[],
    ] {
        let out = qsdistill(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn unwritable_output_is_an_error() {
    let out = qsdistill(&["fig1", "--points", "4", "--out", "/nonexistent-dir/x.csv"]);
    assert!(!out.status.success());
}

#[test]
fn fig3_source_not_both_transports_the_rank2_threshold() {
    let csv = stdout(&["fig3", "--nbar", "0", "--points", "61", "--tmax", "3", "--policy", "both", "--not", "source"]);
    assert_eq!(num(&csv, 0, "p_success"), 1.0);
    for row in 0..61 {
        let (cu, cd) = (num(&csv, row, "c_undistilled"), num(&csv, row, "c_distilled"));
        if (cu - 0.5).abs() > 1e-10 && cu < 1.0 - 1e-12 {
            assert_eq!(cd > cu, cu > 0.5, "row {row}: {cu} -> {cd}");
        }
    }
}
