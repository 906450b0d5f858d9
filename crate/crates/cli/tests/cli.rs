//! The `ultrawave` binary: exit codes, artifacts and determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use ultrawave_cli::{read_field, FieldData};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ultrawave"))
        .args(args)
        .output()
        .expect("binary runs");
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().expect("exit code"), text)
}

fn run_config(experiment: &str, name: &str, out: &Path, extra: &[&str]) -> (i32, String) {
    let cfg = config(name);
    let mut args = vec![experiment, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn passing_run_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_config("conserve", "conserve.toml", dir.path(), &[]);
    assert_eq!(code, 0, "{text}");
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("passed = true"));
    assert!(report.contains("energy_drift_C"));
    assert!(dir.path().join("table_energy_C.csv").exists());
}

#[test]
fn failing_check_exits_one_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_config("determinacy-sweep", "determinacy_printed_b2.toml", dir.path(), &[]);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("check failed: z_eps_boundary_residual"), "{text}");
    assert!(dir.path().join("report.txt").exists());
}

#[test]
fn invalid_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_config("witness", "witness_bad_margin.toml", dir.path(), &[]);
    assert_eq!(code, 2);
    assert!(text.contains("[2, 0]"), "{text}");
    assert!(!dir.path().join("report.txt").exists());

    let (code, text) = run_config("conserve", "witness.toml", dir.path(), &[]);
    assert_eq!(code, 2);
    assert!(text.contains("config is for experiment witness"), "{text}");

    let (code, _) = run(&["conserve", "--config", "/nonexistent/config.toml"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["no-such-experiment", "--config", "x.toml"]);
    assert_eq!(code, 2);

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "sizes = [32, 33]\n").unwrap();
    let (code, text) = run(&["project", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(text.contains("must be odd"), "{text}");
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical_and_seed_matters() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run_config("propagate", "propagate.toml", a.path(), &[]).0, 0);
    assert_eq!(run_config("propagate", "propagate.toml", b.path(), &[]).0, 0);
    assert_eq!(dir_bytes(a.path()), dir_bytes(b.path()));
    assert_eq!(run_config("propagate", "propagate.toml", c.path(), &["--seed", "99"]).0, 0);
    let other = fs::read_to_string(c.path().join("report.txt")).unwrap();
    assert!(other.contains("seed = 99"));
    assert_ne!(fs::read(a.path().join("u0_y0.uhf")).unwrap(), fs::read(c.path().join("u0_y0.uhf")).unwrap());
}

#[test]
fn propagate_resumes_from_its_own_output() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run_config("propagate", "propagate.toml", a.path(), &[]).0, 0);
    let cfg = b.path().join("resume.toml");
    let (u0, u1) = (a.path().join("u0_y0.uhf"), a.path().join("u1_y0.uhf"));
    fs::write(
        &cfg,
        format!("[propagate]\ny1 = [0.5]\nu0_file = {:?}\nu1_file = {:?}\n", u0.to_str().unwrap(), u1.to_str().unwrap()),
    )
    .unwrap();
    let (code, text) = run(&["propagate", "--config", cfg.to_str().unwrap(), "--out", b.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    // 0.5 + 0.5 against the first run's state at 1.0
    let (FieldData::Spectral(want), FieldData::Spectral(got)) = (
        read_field(&a.path().join("u0_y1.uhf")).unwrap(),
        read_field(&b.path().join("u0_y0.uhf")).unwrap(),
    ) else {
        panic!("spectral files expected");
    };
    assert!(got.sub(&want).unwrap().max_abs() <= 1e-12 * want.max_abs());
}
