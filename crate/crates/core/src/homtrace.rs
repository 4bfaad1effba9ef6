//! Coincidence-versus-delay traces for photons of finite bandwidth.
//!
//! The coincidence module treats the photons as monochromatic; real pairs
//! have a coherence time, so the exchange interference switches off as the
//! relative arrival delay τ grows. For transform-limited Gaussian wavepackets
//! the two-photon overlap is itself a Gaussian in τ, and an imperfect source
//! caps it below 1. The normalized coincidence rate (coincidences divided by
//! the fully-distinguishable plateau) is then
//!
//! ```text
//! C(τ)/C_dis = 1 + k(τ)·v,   k(τ) = v_source · exp(−τ²/(2σ²)),
//! ```
//!
//! where v is the monochromatic visibility at the chosen analysis angle. A
//! negative v digs the familiar dip below the plateau; a positive v raises a
//! peak above it.

use crate::biphoton::predict_visibility;
use crate::error::{Error, Result};
use crate::polarization::{BasisAngle, CouplerParams};

/// Gaussian overlap model of the photon pair: how much exchange interference
/// survives at a given delay.
///
/// Invariants: `source_visibility` ∈ [0, 1] and `coherence_sigma_fs` > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayModel {
    /// Interference contrast of the source at zero delay (1 = ideal pair).
    pub source_visibility: f64,
    /// Gaussian width of the overlap in delay, fs.
    pub coherence_sigma_fs: f64,
}

impl DelayModel {
    /// Builds and validates a delay model.
    ///
    /// # Errors
    /// [`Error::InvalidParameter`] if `source_visibility` leaves [0, 1] or
    /// `coherence_sigma_fs` is not positive and finite.
    pub fn new(source_visibility: f64, coherence_sigma_fs: f64) -> Result<Self> {
        if !source_visibility.is_finite() || !(0.0..=1.0).contains(&source_visibility) {
            return Err(Error::InvalidParameter {
                name: "source_visibility",
                requirement: "within [0, 1]",
                value: source_visibility,
            });
        }
        if !coherence_sigma_fs.is_finite() || coherence_sigma_fs <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "coherence_sigma_fs",
                requirement: "positive and finite",
                value: coherence_sigma_fs,
            });
        }
        Ok(Self {
            source_visibility,
            coherence_sigma_fs,
        })
    }
}

/// Two-photon overlap at delay `tau_fs`:
/// v_source · exp(−τ² / (2σ²)). Even in τ, peaks at `source_visibility` for
/// τ = 0, and vanishes for |τ| ≫ σ.
pub fn overlap(tau_fs: f64, model: &DelayModel) -> f64 {
    let x = tau_fs / model.coherence_sigma_fs;
    model.source_visibility * (-0.5 * x * x).exp()
}

/// A sampled normalized-coincidence trace at one analysis angle.
#[derive(Debug, Clone, PartialEq)]
pub struct HomTrace {
    theta: BasisAngle,
    visibility: f64,
    points: Vec<(f64, f64)>,
}

impl HomTrace {
    /// The analysis angle the trace was computed for.
    pub fn theta(&self) -> BasisAngle {
        self.theta
    }

    /// The monochromatic visibility underlying the trace.
    pub fn visibility(&self) -> f64 {
        self.visibility
    }

    /// The `(τ in fs, normalized coincidence)` samples, in grid order.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Serializes the trace as CSV with header
    /// `tau_fs,normalized_coincidence`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau_fs,normalized_coincidence\n");
        for &(tau, value) in &self.points {
            out.push_str(&format!("{tau},{value}\n"));
        }
        out
    }
}

/// Computes the normalized coincidence trace 1 + k(τ)·v over `tau_grid`,
/// with v the visibility of the canonical pair after the full coupler length
/// `params.length_z`, analyzed at `theta`.
///
/// # Errors
/// [`Error::EmptyAxis`] for an empty grid; [`Error::InvalidParameter`] for a
/// non-finite delay; [`Error::UndefinedVisibility`] propagated from the
/// underlying visibility when the distinguishable rate vanishes.
pub fn hom_trace(
    params: &CouplerParams,
    theta: BasisAngle,
    model: &DelayModel,
    tau_grid: &[f64],
) -> Result<HomTrace> {
    if tau_grid.is_empty() {
        return Err(Error::EmptyAxis("tau"));
    }
    if let Some(&bad) = tau_grid.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tau",
            requirement: "finite",
            value: bad,
        });
    }
    let result = predict_visibility(params, theta, params.length_z)?;
    let points = tau_grid
        .iter()
        .map(|&tau| (tau, 1.0 + overlap(tau, model) * result.visibility))
        .collect();
    Ok(HomTrace {
        theta,
        visibility: result.visibility,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn device() -> CouplerParams {
        CouplerParams::new(0.0, 0.0, 0.1035, 0.02433, 15.0).unwrap()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn overlap_peaks_at_zero_delay_and_dies_off() {
        let model = DelayModel::new(0.972, 300.0).unwrap();
        assert_abs_diff_eq!(overlap(0.0, &model), 0.972, epsilon = 1e-15);
        // One sigma: factor e^{−1/2}.
        assert_abs_diff_eq!(
            overlap(300.0, &model),
            0.972 * (-0.5f64).exp(),
            epsilon = 1e-12
        );
        assert!(overlap(3000.0, &model) < 1e-9);
    }

    #[test]
    fn model_validation() {
        assert!(DelayModel::new(1.2, 300.0).is_err());
        assert!(DelayModel::new(-0.1, 300.0).is_err());
        assert!(DelayModel::new(0.9, 0.0).is_err());
        assert!(DelayModel::new(0.9, -5.0).is_err());
        assert!(DelayModel::new(f64::NAN, 300.0).is_err());
    }

    #[test]
    fn ideal_full_dip_reaches_zero_at_zero_delay() {
        // v = −1 at θ = 0 and a perfect source: the trace bottoms out at 0.
        let model = DelayModel::new(1.0, 300.0).unwrap();
        let trace = hom_trace(&device(), BasisAngle::HV, &model, &grid(-900.0, 900.0, 31)).unwrap();
        let center = trace
            .points()
            .iter()
            .find(|(tau, _)| *tau == 0.0)
            .expect("grid contains 0");
        assert_abs_diff_eq!(center.1, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn device_peak_height_at_ad_analysis() {
        // v(45°) = 0.525084263495027 and source visibility 0.972 give a
        // zero-delay peak of 1 + 0.972 · v.
        let model = DelayModel::new(0.972, 300.0).unwrap();
        let trace = hom_trace(&device(), BasisAngle::AD, &model, &[0.0]).unwrap();
        assert_abs_diff_eq!(trace.points()[0].1, 1.510381904117166, epsilon = 1e-12);
        assert_abs_diff_eq!(trace.visibility(), 0.525084263495027, epsilon = 1e-12);
    }

    #[test]
    fn wings_return_to_the_distinguishable_plateau() {
        let model = DelayModel::new(0.972, 300.0).unwrap();
        let trace = hom_trace(
            &device(),
            BasisAngle::from_degrees(30.0),
            &model,
            &[-5000.0, 5000.0],
        )
        .unwrap();
        for &(_, value) in trace.points() {
            assert_abs_diff_eq!(value, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn trace_preserves_the_input_grid() {
        let model = DelayModel::new(0.9, 250.0).unwrap();
        let taus = grid(-1200.0, 1200.0, 241);
        let trace = hom_trace(&device(), BasisAngle::AD, &model, &taus).unwrap();
        assert_eq!(trace.points().len(), taus.len());
        for (&tau, &(tau_out, _)) in taus.iter().zip(trace.points()) {
            assert_eq!(tau, tau_out);
        }
    }

    #[test]
    fn empty_or_bad_grids_are_rejected() {
        let model = DelayModel::new(0.9, 250.0).unwrap();
        assert!(matches!(
            hom_trace(&device(), BasisAngle::AD, &model, &[]),
            Err(Error::EmptyAxis(_))
        ));
        assert!(hom_trace(&device(), BasisAngle::AD, &model, &[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn csv_has_expected_header_and_rows() {
        let model = DelayModel::new(0.9, 250.0).unwrap();
        let trace = hom_trace(&device(), BasisAngle::AD, &model, &[-100.0, 0.0, 100.0]).unwrap();
        let csv = trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("tau_fs,normalized_coincidence"));
        assert_eq!(lines.count(), 3);
        assert!(csv.starts_with("tau_fs,normalized_coincidence\n-100,"));
    }

    proptest! {
        #[test]
        fn trace_is_even_in_delay(
            theta in 0.0f64..1.5,
            tau in 0.0f64..2000.0,
            sv in 0.0f64..1.0,
            sigma in 50.0f64..600.0,
        ) {
            let model = DelayModel::new(sv, sigma).unwrap();
            let trace = hom_trace(&device(), BasisAngle::from_radians(theta), &model, &[-tau, tau]).unwrap();
            let p = trace.points();
            prop_assert!((p[0].1 - p[1].1).abs() < 1e-12);
        }

        #[test]
        fn trace_stays_within_physical_bounds(
            theta in 0.001f64..1.5,
            sv in 0.0f64..1.0,
            sigma in 50.0f64..600.0,
            delta_beta_z in -3.0f64..3.0,
        ) {
            // v ∈ [−1, 1) and k ∈ [0, 1] keep the normalized trace in [0, 2].
            let params = device().with_accumulated_phase(delta_beta_z).unwrap();
            let model = DelayModel::new(sv, sigma).unwrap();
            let taus: Vec<f64> = (-5..=5).map(|i| 120.0 * i as f64).collect();
            let trace = hom_trace(&params, BasisAngle::from_radians(theta), &model, &taus).unwrap();
            for &(_, value) in trace.points() {
                prop_assert!((0.0..=2.0).contains(&value));
            }
        }

        #[test]
        fn dip_or_peak_follows_the_visibility_sign(
            theta in 0.05f64..1.5,
            sigma in 50.0f64..600.0,
        ) {
            let model = DelayModel::new(0.972, sigma).unwrap();
            let trace = hom_trace(&device(), BasisAngle::from_radians(theta), &model, &[0.0, 10.0 * sigma]).unwrap();
            let center = trace.points()[0].1;
            let wing = trace.points()[1].1;
            if trace.visibility() > 1e-9 {
                prop_assert!(center > wing);
            } else if trace.visibility() < -1e-9 {
                prop_assert!(center < wing);
            }
        }
    }
}
