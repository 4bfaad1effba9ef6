//! Classical crossed-polarizer calibration of the accumulated phase.
//!
//! Before quantum measurements, the birefringent phase Δβ·z of a device is
//! calibrated with classical light: launch linearly polarized light at angle
//! φ to the H axis, place a crossed polarizer at the output, and record the
//! transmitted power fraction. For a lossless birefringent element that
//! fraction is
//!
//! ```text
//! ratio(φ) = sin²(2φ) · sin²(Δβ·z),
//! ```
//!
//! so a sweep over φ traces a sin²(2φ) fringe whose amplitude encodes the
//! phase. Fitting that amplitude pins Δβ·z up to the inherent ambiguities of
//! sin² (sign and π-periodicity), so the estimate is reported on the
//! fundamental branch [0, π/2].

use crate::error::{Error, Result};
use crate::exec;
use std::f64::consts::FRAC_PI_2;

/// One crossed-polarizer measurement: launch angle and transmitted power
/// fraction.
///
/// Invariants: `phi_rad` is finite and `ratio` ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizerSample {
    /// Launch polarization angle, radians from the H axis.
    pub phi_rad: f64,
    /// Power fraction behind the crossed polarizer.
    pub ratio: f64,
}

impl PolarizerSample {
    /// Builds and validates a sample.
    ///
    /// # Errors
    /// [`Error::InvalidParameter`] if `phi_rad` is non-finite or `ratio`
    /// leaves [0, 1].
    pub fn new(phi_rad: f64, ratio: f64) -> Result<Self> {
        if !phi_rad.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi_rad",
                requirement: "finite",
                value: phi_rad,
            });
        }
        if !ratio.is_finite() || !(0.0..=1.0).contains(&ratio) {
            return Err(Error::InvalidParameter {
                name: "ratio",
                requirement: "within [0, 1]",
                value: ratio,
            });
        }
        Ok(Self { phi_rad, ratio })
    }
}

/// Crossed-polarizer transmission ratio sin²(2φ)·sin²(phase) of a lossless
/// birefringent element with accumulated phase `phase_rad`, probed at launch
/// angle `phi_rad`.
pub fn crossed_polarizer_intensity(phi_rad: f64, phase_rad: f64) -> f64 {
    let fringe = (2.0 * phi_rad).sin();
    let contrast = phase_rad.sin();
    fringe * fringe * contrast * contrast
}

/// Result of the phase fit: the estimate and the root-mean-square residual of
/// the samples against the fitted model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    /// Fitted accumulated phase, radians, on the branch [0, π/2].
    pub phase_rad: f64,
    /// RMS misfit of the samples to the fitted fringe.
    pub residual: f64,
}

impl PhaseEstimate {
    /// Serializes as single-record CSV with header `phase_rad,residual`.
    pub fn to_csv(&self) -> String {
        format!("phase_rad,residual\n{},{}\n", self.phase_rad, self.residual)
    }
}

/// Number of coarse grid points scanned over [0, π/2] before refinement.
const GRID_POINTS: usize = 181;
/// Bracket width (in grid steps) handed to the golden-section refinement.
const REFINE_TOLERANCE: f64 = 1e-12;

/// Fits the accumulated phase to crossed-polarizer samples by least squares.
///
/// The sum of squared residuals is scanned on a coarse grid over the
/// fundamental branch [0, π/2] and the winning bracket is refined by
/// golden-section search, which is immune to the local minima the π-periodic
/// fringe produces on wider intervals. Deterministic: equal inputs give equal
/// estimates.
///
/// # Errors
/// [`Error::InvalidInput`] for fewer than 3 samples;
/// [`Error::UnidentifiablePhase`] when every sample sits at a node of the
/// sin²(2φ) fringe (φ a multiple of π/2), where the data carry no phase
/// information.
pub fn estimate_phase(samples: &[PolarizerSample]) -> Result<PhaseEstimate> {
    if samples.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "phase fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    let identifiable = samples.iter().any(|s| {
        let fringe = (2.0 * s.phi_rad).sin();
        fringe * fringe > 1e-12
    });
    if !identifiable {
        return Err(Error::UnidentifiablePhase);
    }
    let sse = |phase: f64| -> f64 {
        samples
            .iter()
            .map(|s| {
                let r = s.ratio - crossed_polarizer_intensity(s.phi_rad, phase);
                r * r
            })
            .sum()
    };
    // Coarse scan of the fundamental branch.
    let step = FRAC_PI_2 / (GRID_POINTS - 1) as f64;
    let coarse = exec::map_range(GRID_POINTS, |i| sse(step * i as f64));
    let best = coarse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    let lo = step * best.saturating_sub(1) as f64;
    let hi = (step * (best + 1) as f64).min(FRAC_PI_2);
    let phase = golden_section_min(&sse, lo, hi);
    let residual = (sse(phase) / samples.len() as f64).sqrt();
    Ok(PhaseEstimate {
        phase_rad: phase,
        residual,
    })
}

/// Golden-section minimization of a unimodal function on [lo, hi].
fn golden_section_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > REFINE_TOLERANCE {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Parses samples from CSV text with header `phi_rad,ratio`.
///
/// # Errors
/// [`Error::InvalidInput`] for a wrong header, a malformed row, or a row
/// failing the sample invariants (with its line number).
pub fn parse_samples_csv(text: &str) -> Result<Vec<PolarizerSample>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("phi_rad,ratio") => {}
        other => {
            return Err(Error::InvalidInput(format!(
                "expected header `phi_rad,ratio`, got {other:?}"
            )))
        }
    }
    let mut samples = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(phi), Some(ratio), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::InvalidInput(format!(
                "line {line_no}: expected exactly 2 comma-separated fields"
            )));
        };
        let parse = |field: &str, name: &str| {
            field.trim().parse::<f64>().map_err(|_| {
                Error::InvalidInput(format!("line {line_no}: cannot parse {name} `{field}`"))
            })
        };
        let sample = PolarizerSample::new(parse(phi, "phi_rad")?, parse(ratio, "ratio")?)
            .map_err(|e| Error::InvalidInput(format!("line {line_no}: {e}")))?;
        samples.push(sample);
    }
    Ok(samples)
}
