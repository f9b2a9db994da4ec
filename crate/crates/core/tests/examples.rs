//! Runs the quick examples so they cannot rot. `cargo test` builds every
//! example into the `examples/` directory next to the test binaries.

use std::path::PathBuf;
use std::process::Command;

fn example(name: &str) -> PathBuf {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let path = deps.parent().unwrap().join("examples").join(name);
    assert!(path.exists(), "example binary {} not built", path.display());
    path
}

fn run(name: &str, args: &[&str]) -> String {
    let out = Command::new(example(name)).args(args).output().unwrap();
    assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn cppn_operators() {
    assert!(!run("cppn_operators", &[]).is_empty());
}

#[test]
fn hyperneat_substrate() {
    assert!(!run("hyperneat_substrate", &[]).is_empty());
}

#[test]
fn generate_sams() {
    assert!(!run("generate_sams", &[]).is_empty());
}

#[test]
fn aptitude() {
    assert!(!run("aptitude", &[]).is_empty());
}

#[test]
fn simulate_sam() {
    assert!(run("simulate_sam", &["4", "4", "4", "--desk"]).contains("fitness"));
}

#[test]
fn neat_and_sga_controllers() {
    run("neat_controller", &["2"]);
    run("sga_baseline", &["2"]);
}

#[test]
fn run_experiment() {
    let dir = tempfile::tempdir().unwrap();
    run("run_experiment", &[dir.path().to_str().unwrap()]);
    assert!(dir.path().join("metrics.csv").exists());
}
