//! Acceptance gate for the reproduction pipeline: running the full
//! artifact-generating command sequence twice must produce byte-identical
//! files. The sequence mirrors the `reproduce` target in the Makefile.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn repo_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn run_ok(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_homsim"))
        .args(args)
        .output()
        .expect("the binary should start");
    assert!(
        out.status.success(),
        "command {args:?} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// One full artifact-generating pass into `out_root`, matching the Makefile's
/// `reproduce` target command for command.
fn generate_all(out_root: &Path) {
    let default_cfg = repo_path("configs/default.cfg");
    let lossless_cfg = repo_path("configs/lossless.cfg");
    let samples = repo_path("data/polarizer_samples.csv");
    let cfg = default_cfg.to_str().unwrap();
    let out = out_root.to_str().unwrap().to_string();
    let out_lossless = out_root.join("lossless").to_str().unwrap().to_string();
    let out_theta18 = out_root.join("theta18").to_str().unwrap().to_string();

    run_ok(&["lattice-decay", "--config", cfg, "--out", &out]);
    run_ok(&["hom-trace", "--config", cfg, "--out", &out]);
    run_ok(&["visibility-scan", "--config", cfg, "--out", &out]);
    run_ok(&[
        "visibility-scan",
        "--config",
        lossless_cfg.to_str().unwrap(),
        "--out",
        &out_lossless,
    ]);
    run_ok(&["predict", "--config", cfg, "--out", &out]);
    run_ok(&[
        "predict",
        "--config",
        cfg,
        "--set",
        "predict.theta_deg=18",
        "--out",
        &out_theta18,
    ]);
    run_ok(&[
        "polarizer-fit",
        "--samples",
        samples.to_str().unwrap(),
        "--config",
        cfg,
        "--out",
        &out,
    ]);
}

/// Every file under `root`, keyed by its path relative to `root`.
fn collect_files(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(dir: &Path, root: &Path, into: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, root, into);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_str()
                    .unwrap()
                    .to_string();
                into.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut files = BTreeMap::new();
    walk(root, root, &mut files);
    files
}

#[test]
fn criterion_13_reproducibility() {
    let run_a = tempfile::tempdir().unwrap();
    let run_b = tempfile::tempdir().unwrap();
    generate_all(run_a.path());
    generate_all(run_b.path());

    let files_a = collect_files(run_a.path());
    let files_b = collect_files(run_b.path());
    let names_a: Vec<&String> = files_a.keys().collect();
    let names_b: Vec<&String> = files_b.keys().collect();
    assert_eq!(names_a, names_b, "the two runs wrote different file sets");
    assert_eq!(
        files_a.len(),
        14,
        "expected the full artifact set, got {names_a:?}"
    );
    for (name, bytes_a) in &files_a {
        assert_eq!(
            bytes_a, &files_b[name],
            "artifact {name} differs between consecutive runs"
        );
    }
    println!("ACCEPTANCE 13 reproducibility: PASS");
}
