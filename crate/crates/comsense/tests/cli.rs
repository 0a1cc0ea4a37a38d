use std::path::Path;
use std::process::{Command, Output};

const MINIMAL: &str = "[sweep]\nname = scan\nmetrics = err_prop\n[axes]\nlambda = linspace(0.5, 0.9, 5)\n";

fn comsense(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_comsense"))
        .args(args)
        .current_dir(dir)
        .env_remove("COMSENSE_WORKERS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn run_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "scan.ini", MINIMAL);
    let out = comsense(&["run", &config, "--out", "results"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("results/scan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("lambda,"));
    assert!(lines[0].contains("err_prop"));

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("results/scan.meta.json")).unwrap()).unwrap();
    assert!(meta["version"].as_str().unwrap().starts_with("comsense "));
    assert_eq!(meta["config"]["sweep"]["name"], "scan");
    assert_eq!(meta["rows"], 5);
}

#[test]
fn validate_reports_grid_size() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "scan.ini", MINIMAL);
    let out = comsense(&["validate", &config], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("5 grid points"));
    assert!(!dir.path().join("scan.csv").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let duplicate = write(dir.path(), "dup.ini", "[sweep]\nname = g\nmetrics = mean_x\n[axes]\nlambda = 0.1\nlambda = 0.2\n");
    let out = comsense(&["validate", &duplicate], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("lambda"));

    let unstable = write(dir.path(), "unstable.ini", "[sweep]\nname = g\nmetrics = err_prop\n[fixed]\nlambda = 1.05\n");
    let out = comsense(&["run", &unstable], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unstable regime"));
    assert!(!dir.path().join("g.csv").exists());

    let out = comsense(&["figure", "fig9"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = comsense(&["run", &write(dir.path(), "ok.ini", MINIMAL), "--workers", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_cells_exit_3_with_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "cut.ini",
        "[sweep]\nname = cut\nmetrics = err_prop_numeric\n[axes]\ncutoff = 6, 80\n[fixed]\nlambda = 0.9\n",
    );
    let out = comsense(&["run", &config], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("cut.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains("CUTOFF"));
    assert!(!lines[2].contains("CUTOFF"));
}

#[test]
fn io_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = comsense(&["run", "missing.ini"], dir.path());
    assert_eq!(out.status.code(), Some(4));

    let config = write(dir.path(), "scan.ini", MINIMAL);
    let blocker = write(dir.path(), "blocker", "");
    let target = format!("{blocker}/sub");
    let out = comsense(&["run", &config, "--out", &target], dir.path());
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "grid.ini",
        "[sweep]\nname = grid\nmetrics = mean_x, var_x, err_prop, qfi_exact\n[axes]\nlambda = linspace(0.1, 0.95, 7)\ns = linspace(0.5, 6, 5)\n",
    );
    let one = comsense(&["run", &config, "--out", "one", "--workers", "1"], dir.path());
    let many = comsense(&["run", &config, "--out", "many", "--workers", "6"], dir.path());
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(many.status.code(), Some(0));
    let a = std::fs::read(dir.path().join("one/grid.csv")).unwrap();
    let b = std::fs::read(dir.path().join("many/grid.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 36);
}

#[test]
fn workers_env_var_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "scan.ini", MINIMAL);
    let out = Command::new(env!("CARGO_BIN_EXE_comsense"))
        .args(["run", &config])
        .current_dir(dir.path())
        .env("COMSENSE_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("COMSENSE_WORKERS"));
}
