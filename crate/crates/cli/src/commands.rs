//! The subcommand implementations: each computes through the simulator
//! library, writes its artifacts atomically into the output directory, and
//! returns the paths written (in a deterministic order).

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use homsim::biphoton::predict_visibility;
use homsim::characterize::{estimate_phase, parse_samples_csv};
use homsim::lattice::{decay_curve, effective_rate, DecayCurve, Polarization};
use homsim::scan::{hom_family, visibility_grid};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::write_atomic;
use crate::Format;

/// Endpoint summary of the two decay curves: transmission after the full
/// propagation length and the exponential loss rate matched to it, per
/// polarization.
#[derive(Debug, Serialize)]
struct RatesReport {
    z_cm: f64,
    transmission_h: f64,
    effective_rate_h_per_cm: f64,
    transmission_v: f64,
    effective_rate_v_per_cm: f64,
}

impl RatesReport {
    fn to_csv(&self) -> String {
        format!(
            "z_cm,transmission_h,effective_rate_h_per_cm,transmission_v,effective_rate_v_per_cm\n\
             {},{},{},{},{}\n",
            self.z_cm,
            self.transmission_h,
            self.effective_rate_h_per_cm,
            self.transmission_v,
            self.effective_rate_v_per_cm
        )
    }
}

/// Coincidence rates and visibility at one analysis angle, for JSON output.
#[derive(Debug, Serialize)]
struct PredictReport {
    theta_rad: f64,
    c_ind: f64,
    c_dis: f64,
    visibility: f64,
}

/// Fitted accumulated phase and its RMS misfit, for JSON output.
#[derive(Debug, Serialize)]
struct PhaseReport {
    phase_rad: f64,
    residual: f64,
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Rate matched to a curve endpoint. Survival can exceed 1 by a few ulps of
/// rounding on a lossless lattice, so clamp from above before converting.
fn endpoint_rate(curve: &DecayCurve) -> Result<f64> {
    let transmission = curve.final_survival().min(1.0);
    Ok(effective_rate(transmission, curve.final_z())?)
}

/// `lattice-decay`: one survival curve per polarization plus the endpoint
/// rate summary.
pub fn lattice_decay(config: &RunConfig, out_dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let geometry = config.geometry()?;
    let mut written = Vec::new();
    let mut endpoints = Vec::new();
    for pol in [Polarization::H, Polarization::V] {
        let curve = decay_curve(&geometry, pol, config.lattice_z_max, config.lattice_n_steps)?;
        let path = out_dir.join(format!("decay_{}.csv", pol.label()));
        write_atomic(&path, &curve.to_csv())?;
        written.push(path);
        endpoints.push((curve.final_survival().min(1.0), endpoint_rate(&curve)?));
    }
    let report = RatesReport {
        z_cm: config.lattice_z_max,
        transmission_h: endpoints[0].0,
        effective_rate_h_per_cm: endpoints[0].1,
        transmission_v: endpoints[1].0,
        effective_rate_v_per_cm: endpoints[1].1,
    };
    let (path, contents) = match format {
        Format::Json => (out_dir.join("effective_rates.json"), to_json(&report)?),
        Format::Csv => (out_dir.join("effective_rates.csv"), report.to_csv()),
    };
    write_atomic(&path, &contents)?;
    written.push(path);
    Ok(written)
}

/// `hom-trace`: one delay-trace CSV per configured analysis angle, named by
/// position in the list and the angle in degrees.
pub fn hom_trace(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let params = config.coupler_params()?;
    let model = config.delay_model()?;
    let traces = hom_family(&params, &config.hom_angles(), &model, &config.tau_grid())?;
    let mut written = Vec::new();
    for (i, trace) in traces.iter().enumerate() {
        let deg = trace.theta().radians().to_degrees();
        let path = out_dir.join(format!("hom_trace_{i:02}_theta_{deg:.1}deg.csv"));
        write_atomic(&path, &trace.to_csv())?;
        written.push(path);
    }
    Ok(written)
}

/// `visibility-scan`: the visibility grid over θ × accumulated phase, with
/// the optional source-contrast factor applied to every defined cell.
/// Undefined cells are noted on stderr and written as `nan`; they are not an
/// error.
pub fn visibility_scan(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let params = config.coupler_params()?;
    let grid = visibility_grid(&params, &config.theta_axis(), &config.phase_axis())?;
    let grid = match config.scan_source_visibility_factor {
        Some(factor) => grid.scaled(factor),
        None => grid,
    };
    for (i, &theta) in grid.theta_axis().iter().enumerate() {
        for (j, &phase) in grid.phase_axis().iter().enumerate() {
            if grid.value(i, j).is_none() {
                eprintln!(
                    "note: visibility undefined at theta_rad={theta}, phase_rad={phase}; \
                     written as nan"
                );
            }
        }
    }
    let path = out_dir.join("visibility_scan.csv");
    write_atomic(&path, &grid.to_csv())?;
    Ok(vec![path])
}

/// `polarizer-fit`: least-squares phase estimate from a crossed-polarizer
/// sample CSV.
pub fn polarizer_fit(samples_path: &Path, out_dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(samples_path)
        .with_context(|| format!("reading samples file {}", samples_path.display()))?;
    let samples = parse_samples_csv(&text)
        .with_context(|| format!("parsing samples file {}", samples_path.display()))?;
    let estimate = estimate_phase(&samples)?;
    let (path, contents) = match format {
        Format::Csv => (out_dir.join("polarizer_fit.csv"), estimate.to_csv()),
        Format::Json => {
            let report = PhaseReport {
                phase_rad: estimate.phase_rad,
                residual: estimate.residual,
            };
            (out_dir.join("polarizer_fit.json"), to_json(&report)?)
        }
    };
    write_atomic(&path, &contents)?;
    Ok(vec![path])
}

/// `predict`: coincidence rates and visibility of the canonical pair at the
/// configured analysis angle, after the full device length.
pub fn predict(config: &RunConfig, out_dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let params = config.coupler_params()?;
    let result = predict_visibility(&params, config.predict_angle(), params.length_z)?;
    let (path, contents) = match format {
        Format::Json => {
            let report = PredictReport {
                theta_rad: result.theta.radians(),
                c_ind: result.c_ind,
                c_dis: result.c_dis,
                visibility: result.visibility,
            };
            (out_dir.join("predict.json"), to_json(&report)?)
        }
        Format::Csv => (out_dir.join("predict.csv"), result.to_csv()),
    };
    write_atomic(&path, &contents)?;
    Ok(vec![path])
}
