//! End-to-end checks of the compiled binary: exit codes, determinism,
//! flag/config precedence, and the documented error texts.

use std::path::Path;
use std::process::{Command, Output};

fn fsde(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsde"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["fbm", "--steps", "512", "--seed", "9", "--out", "a"];
    assert!(fsde(dir.path(), &args).status.success());
    let first_csv = std::fs::read(dir.path().join("a/fbm_H0.75.csv")).unwrap();
    let first_svg = std::fs::read(dir.path().join("a/fbm_H0.75.svg")).unwrap();
    assert!(fsde(dir.path(), &args).status.success());
    assert_eq!(first_csv, std::fs::read(dir.path().join("a/fbm_H0.75.csv")).unwrap());
    assert_eq!(first_svg, std::fs::read(dir.path().join("a/fbm_H0.75.svg")).unwrap());
}

#[test]
fn short_n_list_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fsde(dir.path(), &["converge", "--n-list", "8,16,32", "--steps", "256"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("at least 4"), "{}", stderr(&out));
}

#[test]
fn corrupt_config_names_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.conf"), "alpha = 0.3\nsteps = many\n").unwrap();
    let out = fsde(dir.path(), &["fbm", "--config", "run.conf"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("line 2") && msg.contains("'steps'"), "{msg}");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.conf"), "steps = 64\nseed = 3\n").unwrap();
    let out = fsde(
        dir.path(),
        &["fbm", "--config", "run.conf", "--steps", "128", "--out", "o"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("o/fbm_H0.75.csv")).unwrap();
    // header + N+1 nodes; the flag's 128 wins over the file's 64
    assert_eq!(csv.lines().count(), 1 + 129);
}

#[test]
fn verify_skips_the_derivative_bound_when_gamma_is_not_a_holder_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let out = fsde(dir.path(), &["verify", "--hurst", "0.5", "--steps", "256"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = stdout(&out);
    assert!(table.contains("SKIP") && table.contains("gamma"), "{table}");
    assert!(!table.contains("FAIL"), "{table}");
}

#[test]
fn output_dir_blocked_by_a_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("blocked"), b"").unwrap();
    let out = fsde(dir.path(), &["fbm", "--steps", "64", "--out", "blocked"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("blocked"), "{}", stderr(&out));
}

#[test]
fn brownian_limit_is_labeled() {
    let dir = tempfile::tempdir().unwrap();
    let out = fsde(dir.path(), &["fbm", "--hurst", "0.5", "--steps", "256", "--out", "o"]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(dir.path().join("o/fbm_H0.50.svg")).unwrap();
    assert!(svg.contains("Brownian limit"));
    // and a non-limit H is not mislabeled
    let out = fsde(dir.path(), &["fbm", "--hurst", "0.75", "--steps", "256", "--out", "o"]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(dir.path().join("o/fbm_H0.75.svg")).unwrap();
    assert!(!svg.contains("Brownian limit"));
}

#[test]
fn rough_path_synthesis_meets_its_documented_budget() {
    let dir = tempfile::tempdir().unwrap();
    let started = std::time::Instant::now();
    let out = fsde(
        dir.path(),
        &["fbm", "--hurst", "0.95", "--steps", "4096", "--generator", "circulant"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(
        started.elapsed() < std::time::Duration::from_secs(5),
        "took {:?}",
        started.elapsed()
    );
}

#[test]
fn converge_reports_slope_or_degeneracy() {
    let dir = tempfile::tempdir().unwrap();
    let out = fsde(dir.path(), &["converge", "--steps", "1024", "--out", "c"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("fitted slope: -"), "{}", stdout(&out));
    assert!(dir.path().join("c/convergence.csv").exists());
    assert!(dir.path().join("c/convergence.svg").exists());

    let out = fsde(dir.path(), &["converge", "--alpha", "0.5", "--steps", "1024", "--out", "c"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("degenerate: zero error"), "{}", stdout(&out));
}

#[test]
fn simulate_panel_columns_track_the_n_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = fsde(
        dir.path(),
        &["simulate", "--steps", "512", "--n-list", "4,32", "--out", "s"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("s/sim_H0.75_a0.40.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "t,B,x_exact,x_mollified_n4,x_mollified_n32");
}
