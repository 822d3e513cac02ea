use std::path::Path;
use std::process::{Command, Output};

fn choreo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choreo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn prove_eight(dir: &Path) -> String {
    let path = dir.join("eight.toml");
    let p = path.to_str().unwrap().to_string();
    let o = choreo(&[
        "prove", "--system", "eight", "--method", "newton", "--h", "0.01", "--order", "7",
        "--delta", "1e-6", "--out", &p,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("UniqueZero"));
    p
}

#[test]
fn prove_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = prove_eight(dir.path());
    let text = std::fs::read_to_string(&cert).unwrap();
    assert!(text.contains("verdict = \"UniqueZero\""));
    let o = choreo(&["verify", &cert]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("certificate verified"));
}

#[test]
fn tampered_certificate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cert = prove_eight(dir.path());
    let text = std::fs::read_to_string(&cert).unwrap();
    std::fs::write(
        &cert,
        text.replacen("verdict = \"UniqueZero\"", "verdict = \"NoZero\"", 1),
    )
    .unwrap();
    let o = choreo(&["verify", &cert]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn shifted_candidate_has_no_zero() {
    let base = [
        "prove",
        "--system",
        "eight",
        "--x-bar",
        "0.357,0.5327",
        "--delta",
        "1e-6",
    ];
    let o = choreo(&base);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("no-zero"));
    let mut expect = base.to_vec();
    expect.push("--expect-no-zero");
    assert_eq!(choreo(&expect).status.code(), Some(0));
}

#[test]
fn convexity_from_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = prove_eight(dir.path());
    let out = dir.path().join("convex.toml");
    let o = choreo(&["convexity", "--cert", &cert, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict    pass"));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains("step_count = 53"));
}

#[test]
fn convexity_without_certificate_is_a_usage_error() {
    let o = choreo(&["convexity", "--no-inline"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("usage"));
}

#[test]
fn curve_is_closed_table() {
    let dir = tempfile::tempdir().unwrap();
    let cert = prove_eight(dir.path());
    let o = choreo(&["emit-curve", "--cert", &cert, "--samples", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(rows.iter().all(|r| r.len() == 7));
    let (first, last) = (&rows[0], rows.last().unwrap());
    assert!((last[0] - 6.3259).abs() < 1e-3);
    for i in 1..7 {
        assert!((first[i] - last[i]).abs() < 1e-7, "column {i}");
    }
}

#[test]
fn refine_reports_small_residual() {
    let o = choreo(&["refine", "--system", "eight", "--guess", "0.347,0.5327"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let residual: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("|Phi| = "))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(residual < 1e-10);
    assert!(out.contains("x_bar = 3.4711688"));
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    assert_eq!(
        choreo(&["prove", "--system", "bogus"]).status.code(),
        Some(64)
    );
    assert_eq!(
        choreo(&["prove", "--system", "chain"]).status.code(),
        Some(64)
    );
    assert_eq!(
        choreo(&["refine", "--system", "eight", "--guess", "1,2,3"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(choreo(&["--help"]).status.code(), Some(0));
}
