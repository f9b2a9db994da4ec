use std::path::Path;
use std::process::{Command, Output};

fn phasevo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasevo")).args(args).output().unwrap()
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_sam_then_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let sam = dir.path().join("body.sam");
    let stdout = ok(&phasevo(&["gen-sam", "--kind", "striped", "--seed", "2", "--dims", "4x4x4", "--out", s(&sam)]));
    assert!(stdout.contains("contractile"));
    let body = phasevo::Sam::load(&sam).unwrap();
    assert!(body.is_valid());

    let phases = dir.path().join("phases.csv");
    let rows = vec![vec![1.0; 16]; 4];
    phasevo::sga::SgaIndividual::from_rows(rows).unwrap().save(&phases).unwrap();
    let trace = dir.path().join("trace.csv");
    let stdout = ok(&phasevo(&[
        "simulate", "--sam", s(&sam), "--phases", s(&phases), "--desk", "--duration", "0.1", "--out", s(&trace),
    ]));
    assert!(stdout.starts_with("fitness "));
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# voxel_count="));
    assert_eq!(lines.next(), Some("t,cx,cy,cz"));
    assert!(lines.count() > 2);
}

#[test]
fn evolve_with_config_file_and_override_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        "# tiny run\nalgorithm = sga\nsim_profile = desk\nsam_dims = 4x4x4\nsam_count = 1\n\
         runs = 3\ngenerations = 2\npopulation = 4\naptitude = false\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let stdout = ok(&phasevo(&[
        "evolve", "--config", s(&cfg), "--runs", "2", "--set", "duration=0.1", "--out", s(&out),
    ]));
    assert_eq!(stdout.matches("run ").count(), 2);
    assert!(out.join("run_00.csv").exists());
    assert!(out.join("run_01.csv").exists());
    assert!(!out.join("run_02.csv").exists());
    let saved = std::fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(saved.contains("algorithm = sga"));
    assert!(saved.contains("duration = 0.1"));

    let again = dir.path().join("again");
    let stdout = ok(&phasevo(&["report", "--in", s(&out), "--out", s(&again)]));
    assert!(stdout.contains("2 runs"));
    assert_eq!(
        std::fs::read(out.join("metrics.csv")).unwrap(),
        std::fs::read(again.join("metrics.csv")).unwrap()
    );
    assert!(again.join("fitness.svg").exists());
}

#[test]
fn bad_inputs_fail_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = phasevo(&[
        "evolve", "--sim-profile", "desk", "--sam-dims", "4x4x4", "--runs", "1", "--generations", "1",
        "--out", s(&blocker.join("sub")),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));

    let out = phasevo(&["evolve", "--set", "no_such_key=1", "--out", s(dir.path())]);
    assert!(!out.status.success());
    let out = phasevo(&["gen-sam", "--kind", "pyramidal", "--dims", "4x2", "--out", s(&dir.path().join("x"))]);
    assert!(!out.status.success());
}
