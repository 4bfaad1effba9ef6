//! End-to-end tests of the `homsim` binary: artifacts, formats, overrides,
//! and error reporting.

use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use homsim::biphoton::predict_visibility;
use homsim::polarization::{BasisAngle, CouplerParams};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homsim"))
        .args(args)
        .output()
        .expect("the binary should start")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Path of a file checked into the repository, relative to its root.
fn repo_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

/// The fabricated device, as the built-in defaults describe it.
fn device() -> CouplerParams {
    CouplerParams::new(0.0, 0.0, 0.1035, 0.02433, 15.0).unwrap()
}

#[test]
fn predict_writes_json_with_the_device_visibility() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&["predict", "--out", dir.path().to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("predict.json"));

    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("predict.json"))).unwrap();
    let expected = predict_visibility(&device(), BasisAngle::AD, 15.0).unwrap();
    assert_eq!(json["theta_rad"].as_f64().unwrap(), FRAC_PI_4);
    assert!((json["visibility"].as_f64().unwrap() - expected.visibility).abs() < 1e-15);
    assert!((json["c_ind"].as_f64().unwrap() - expected.c_ind).abs() < 1e-15);
    assert!((json["c_dis"].as_f64().unwrap() - expected.c_dis).abs() < 1e-15);
    // The headline number: the lossy device turns the dip into a peak.
    assert!((json["visibility"].as_f64().unwrap() - 0.525).abs() < 1e-3);
}

#[test]
fn predict_csv_format_writes_the_single_record() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "predict",
        "--format",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let text = read(&dir.path().join("predict.csv"));
    assert!(text.starts_with("theta_rad,c_ind,c_dis,visibility\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn predict_accepts_an_angle_override_in_degrees() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "predict",
        "--set",
        "predict.theta_deg=18",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("predict.json"))).unwrap();
    let expected = predict_visibility(&device(), BasisAngle::from_degrees(18.0), 15.0).unwrap();
    assert!((json["visibility"].as_f64().unwrap() - expected.visibility).abs() < 1e-15);
}

#[test]
fn lattice_decay_with_zero_couplings_keeps_unit_survival() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "lattice-decay",
        "--set",
        "lattice.couple_target_h=0",
        "--set",
        "lattice.couple_target_v=0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    for name in ["decay_h.csv", "decay_v.csv"] {
        let text = read(&dir.path().join(name));
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("z_cm,survival_probability"));
        for line in lines {
            let survival: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!(
                (survival - 1.0).abs() < 1e-9,
                "{name} should stay at 1, got {survival}"
            );
        }
    }
    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("effective_rates.json"))).unwrap();
    assert!(json["effective_rate_h_per_cm"].as_f64().unwrap().abs() < 1e-9);
    assert!(json["effective_rate_v_per_cm"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn lattice_decay_rates_approximate_the_device_losses() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["lattice-decay", "--out", dir.path().to_str().unwrap()]);
    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("effective_rates.json"))).unwrap();
    let rate_h = json["effective_rate_h_per_cm"].as_f64().unwrap();
    let rate_v = json["effective_rate_v_per_cm"].as_f64().unwrap();
    assert!((rate_h - 0.1035).abs() / 0.1035 < 0.30, "rate_h = {rate_h}");
    assert!((rate_v - 0.02433).abs() / 0.02433 < 0.10, "rate_v = {rate_v}");
}

#[test]
fn lattice_decay_csv_format_writes_the_rate_summary_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "lattice-decay",
        "--format",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let text = read(&dir.path().join("effective_rates.csv"));
    assert!(text.starts_with(
        "z_cm,transmission_h,effective_rate_h_per_cm,transmission_v,effective_rate_v_per_cm\n"
    ));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn polarizer_fit_recovers_the_quarter_wave_phase() {
    let dir = tempfile::tempdir().unwrap();
    let samples = repo_path("data/polarizer_samples.csv");
    run_ok(&[
        "polarizer-fit",
        "--samples",
        samples.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let text = read(&dir.path().join("polarizer_fit.csv"));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("phase_rad,residual"));
    let record = lines.next().unwrap();
    let phase: f64 = record.split(',').next().unwrap().parse().unwrap();
    assert!(
        (phase - FRAC_PI_4).abs() < 1e-6,
        "fitted phase {phase} should be π/4"
    );
}

#[test]
fn polarizer_fit_json_format_carries_the_same_fields() {
    let dir = tempfile::tempdir().unwrap();
    let samples = repo_path("data/polarizer_samples.csv");
    run_ok(&[
        "polarizer-fit",
        "--samples",
        samples.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("polarizer_fit.json"))).unwrap();
    assert!((json["phase_rad"].as_f64().unwrap() - FRAC_PI_4).abs() < 1e-6);
    assert!(json["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn hom_trace_writes_one_file_per_angle_with_the_expected_extremes() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["hom-trace", "--out", dir.path().to_str().unwrap()]);
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        vec![
            "hom_trace_00_theta_0.0deg.csv",
            "hom_trace_01_theta_9.0deg.csv",
            "hom_trace_02_theta_18.0deg.csv",
            "hom_trace_03_theta_27.0deg.csv",
            "hom_trace_04_theta_36.0deg.csv",
            "hom_trace_05_theta_45.0deg.csv",
        ]
    );

    let column = |name: &str| -> Vec<f64> {
        read(&dir.path().join(name))
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    // θ = 0: full dip, floored by the source contrast 0.972.
    let dip = column("hom_trace_00_theta_0.0deg.csv")
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    assert!((dip - 0.028).abs() < 1e-9, "dip bottom = {dip}");
    // θ = 45°: the loss-enabled peak rises above the flat wings.
    let peak = column("hom_trace_05_theta_45.0deg.csv")
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(peak > 1.5, "peak top = {peak}");
}

#[test]
fn visibility_scan_is_deterministic_across_runs() {
    let args = |dir: &Path| {
        vec![
            "visibility-scan".to_string(),
            "--set".to_string(),
            "scan.theta_steps=13".to_string(),
            "--set".to_string(),
            "scan.phase_steps=11".to_string(),
            "--out".to_string(),
            dir.to_str().unwrap().to_string(),
        ]
    };
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let args = args(dir.path());
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        run_ok(&refs);
    }
    let text_a = read(&dir_a.path().join("visibility_scan.csv"));
    let text_b = read(&dir_b.path().join("visibility_scan.csv"));
    assert_eq!(text_a, text_b);
    assert_eq!(text_a.lines().count(), 1 + 13 * 11);
    assert!(text_a.starts_with("theta_rad,phase_rad,visibility\n"));
}

#[test]
fn visibility_scan_notes_undefined_cells_and_still_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&[
        "visibility-scan",
        "--set",
        "coupler.gamma_h=1000",
        "--set",
        "scan.theta_steps=3",
        "--set",
        "scan.phase_steps=3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(stderr_of(&out).contains("visibility undefined"));
    let text = read(&dir.path().join("visibility_scan.csv"));
    assert!(text.contains(",nan\n"));
}

#[test]
fn scan_source_visibility_factor_scales_the_grid() {
    let run_scan = |extra: &[&str]| -> Vec<f64> {
        let dir = tempfile::tempdir().unwrap();
        let mut args = vec![
            "visibility-scan",
            "--set",
            "scan.theta_steps=5",
            "--set",
            "scan.phase_steps=5",
        ];
        args.extend_from_slice(extra);
        let out_dir = dir.path().to_str().unwrap().to_string();
        args.extend_from_slice(&["--out", &out_dir]);
        run_ok(&args);
        read(&dir.path().join("visibility_scan.csv"))
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect()
    };
    let ideal = run_scan(&[]);
    let scaled = run_scan(&["--set", "scan.source_visibility_factor=0.5"]);
    assert_eq!(ideal.len(), scaled.len());
    for (a, b) in ideal.iter().zip(&scaled) {
        assert!((0.5 * a - b).abs() < 1e-15, "{a} scaled to {b}");
    }
}

#[test]
fn invalid_config_values_fail_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    fs::write(&config, "coupler.gamma_h = -0.25\n").unwrap();
    let out = run(&["predict", "--config", config.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("coupler.gamma_h"), "{}", stderr_of(&out));
}

#[test]
fn unknown_override_keys_fail_naming_the_key() {
    let out = run(&["predict", "--set", "coupler.gamma_x=1"]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("coupler.gamma_x"), "{}", stderr_of(&out));
}

#[test]
fn a_missing_config_file_fails_with_its_path() {
    let out = run(&["predict", "--config", "/definitely/not/here.cfg"]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("here.cfg"), "{}", stderr_of(&out));
}

#[test]
fn a_malformed_set_flag_fails_with_the_expected_shape() {
    let out = run(&["predict", "--set", "predict.theta"]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("KEY=VALUE"), "{}", stderr_of(&out));
}

#[test]
fn an_unwritable_output_directory_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("taken");
    fs::write(&blocker, "a file where a directory must go").unwrap();
    let out = run(&["predict", "--out", blocker.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("taken"), "{}", stderr_of(&out));
}

#[test]
fn the_out_flag_overrides_the_configured_directory() {
    let config_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let config = config_dir.path().join("run.cfg");
    fs::write(
        &config,
        format!("output.dir = {}\n", config_dir.path().join("ignored").display()),
    )
    .unwrap();
    run_ok(&[
        "predict",
        "--config",
        config.to_str().unwrap(),
        "--out",
        flag_dir.path().to_str().unwrap(),
    ]);
    assert!(flag_dir.path().join("predict.json").exists());
    assert!(!config_dir.path().join("ignored").exists());
}

#[test]
fn undefined_visibility_in_predict_is_a_hard_error() {
    let out = run(&[
        "predict",
        "--set",
        "coupler.gamma_h=1000",
        "--set",
        "predict.theta_deg=0",
    ]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("undefined"), "{}", stderr_of(&out));
}

#[test]
fn config_subcommand_round_trips_through_itself() {
    let out = run_ok(&["config", "--set", "coupler.gamma_h=0.2"]);
    let first = String::from_utf8(out.stdout).unwrap();
    assert!(first.contains("coupler.gamma_h = 0.2\n"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("echo.cfg");
    fs::write(&path, &first).unwrap();
    let out = run_ok(&["config", "--config", path.to_str().unwrap()]);
    let second = String::from_utf8(out.stdout).unwrap();
    assert_eq!(first, second);
}

#[test]
fn checked_in_configs_parse_through_the_binary() {
    for rel in ["configs/default.cfg", "configs/lossless.cfg"] {
        let path = repo_path(rel);
        run_ok(&["config", "--config", path.to_str().unwrap()]);
    }
}
