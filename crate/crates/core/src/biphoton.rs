//! Two-photon states in the lossy coupler and their coincidence statistics.
//!
//! The source prepares a photon pair split between the A and D polarizations.
//! Whether the two photons interfere depends on their distinguishability, so
//! the same preparation is tracked in two forms:
//!
//! * **Indistinguishable** — a genuine two-boson Fock state over the H/V
//!   modes, stored as amplitudes on |2_H⟩, |1_H 1_V⟩, |2_V⟩. In the H/V basis
//!   the canonical A/D pair is (|VV⟩ − |HH⟩)/√2, the antisymmetric
//!   polarization Bell state, which contains *no* |1_H 1_V⟩ component.
//! * **Distinguishable** — the photons carry a label (e.g. arrival time), so
//!   the state is a labelled product with one amplitude per ordered pair of
//!   polarizations, and no exchange interference occurs.
//!
//! Both photons propagate through the same coupler, so each labelled photon —
//! and each creation operator of the Fock state — is transformed by the
//! single-photon propagator of [`crate::polarization`]. Detection happens
//! behind a half-wave plate and polarizing beam splitter: a *coincidence* is
//! one photon in each splitter output. Interference is quantified by the
//! visibility v = C_ind/C_dis − 1, negative for the familiar two-photon dip
//! and positive for a peak; a lossless coupler can only produce v ∈ [−1, 0],
//! while polarization-dependent loss makes v > 0 reachable.
//!
//! Two independent computation routes are provided on purpose. [`evolve`] +
//! [`coincidence`] use the closed-form mode expansion of the three Fock
//! patterns; [`two_photon_transfer`] pushes the state through an arbitrary
//! 2×2 transfer matrix with matrix permanents, the general bosonic rule. The
//! routes share no algebra and must agree, which the tests enforce.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polarization::{propagator, BasisAngle, CouplerParams, JonesMatrix};

/// Whether the photon pair interferes as identical bosons or is fully
/// labelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairKind {
    /// Identical photons: exchange interference active.
    Indistinguishable,
    /// Labelled photons: classical transfer of each photon separately.
    Distinguishable,
}

/// A two-photon polarization state in one of the two distinguishability
/// sectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoPhotonState {
    /// Bosonic Fock amplitudes on |2_H⟩, |1_H 1_V⟩, |2_V⟩.
    Indistinguishable {
        /// Amplitude on |2_H⟩ (both photons horizontal).
        two_h: Complex64,
        /// Amplitude on |1_H 1_V⟩ (one photon in each mode).
        one_each: Complex64,
        /// Amplitude on |2_V⟩ (both photons vertical).
        two_v: Complex64,
    },
    /// Labelled amplitudes: `amps[i][j]` is the amplitude for photon 1 in
    /// mode i and photon 2 in mode j (0 = H, 1 = V).
    Distinguishable {
        /// Ordered-pair amplitudes, photon-1-major.
        amps: [[Complex64; 2]; 2],
    },
}

impl TwoPhotonState {
    /// Which distinguishability sector the state lives in.
    pub fn kind(&self) -> PairKind {
        match self {
            TwoPhotonState::Indistinguishable { .. } => PairKind::Indistinguishable,
            TwoPhotonState::Distinguishable { .. } => PairKind::Distinguishable,
        }
    }

    /// Squared norm: the probability that both photons are still present.
    pub fn norm_sqr(&self) -> f64 {
        match self {
            TwoPhotonState::Indistinguishable {
                two_h,
                one_each,
                two_v,
            } => two_h.norm_sqr() + one_each.norm_sqr() + two_v.norm_sqr(),
            TwoPhotonState::Distinguishable { amps } => {
                amps.iter().flatten().map(|a| a.norm_sqr()).sum()
            }
        }
    }
}

/// The canonical input pair: one photon in A, one in D.
///
/// In the H/V mode basis this is (|VV⟩ − |HH⟩)/√2 for indistinguishable
/// photons — the |1_H 1_V⟩ component cancels by exchange symmetry — and the
/// labelled product A ⊗ D for distinguishable ones.
pub fn input_state(kind: PairKind) -> TwoPhotonState {
    let re = |x: f64| Complex64::new(x, 0.0);
    match kind {
        PairKind::Indistinguishable => TwoPhotonState::Indistinguishable {
            two_h: re(-std::f64::consts::FRAC_1_SQRT_2),
            one_each: re(0.0),
            two_v: re(std::f64::consts::FRAC_1_SQRT_2),
        },
        // Photon 1 in A = (−1, 1)/√2, photon 2 in D = (1, 1)/√2.
        PairKind::Distinguishable => TwoPhotonState::Distinguishable {
            amps: [[re(-0.5), re(-0.5)], [re(0.5), re(0.5)]],
        },
    }
}

/// Propagates a two-photon state a distance `z` through the coupler.
///
/// Each photon is transformed by the single-photon propagator, so the Fock
/// amplitudes scale as u_H², u_H·u_V, u_V² and the labelled amplitudes as
/// u_i·u_j, with u the diagonal mode factors e^{−iβz−γz}.
///
/// # Errors
/// [`Error::InvalidDistance`] if `z` is negative or non-finite.
pub fn evolve(state: &TwoPhotonState, params: &CouplerParams, z: f64) -> Result<TwoPhotonState> {
    let u = propagator(params, z)?;
    let (u_h, u_v) = (u.get(0, 0), u.get(1, 1));
    Ok(match *state {
        TwoPhotonState::Indistinguishable {
            two_h,
            one_each,
            two_v,
        } => TwoPhotonState::Indistinguishable {
            two_h: two_h * u_h * u_h,
            one_each: one_each * u_h * u_v,
            two_v: two_v * u_v * u_v,
        },
        TwoPhotonState::Distinguishable { amps } => {
            let factors = [u_h, u_v];
            let mut out = amps;
            for (i, row) in out.iter_mut().enumerate() {
                for (j, amp) in row.iter_mut().enumerate() {
                    *amp *= factors[i] * factors[j];
                }
            }
            TwoPhotonState::Distinguishable { amps: out }
        }
    })
}

/// Probabilities of the three detection outcomes behind the analysis
/// half-wave plate and polarizing beam splitter.
///
/// For a lossless, normalized state the three sum to 1; loss removes photons
/// and lowers the total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionProbabilities {
    /// One photon in each splitter output.
    pub coincidence: f64,
    /// Both photons in output 1.
    pub bunched_1: f64,
    /// Both photons in output 2.
    pub bunched_2: f64,
}

impl DetectionProbabilities {
    /// Total probability that both photons survive to the detectors.
    pub fn total(&self) -> f64 {
        self.coincidence + self.bunched_1 + self.bunched_2
    }
}

/// Computes the detection probabilities of `state` analyzed at HWP angle
/// `theta`, from the closed-form mode expansion.
///
/// Indistinguishable states use the bosonic expansion of the three Fock
/// patterns through the plate (the √2 factors are the boson enhancement);
/// distinguishable states transform each labelled photon separately and add
/// the two coincidence orderings incoherently.
pub fn detection_probabilities(
    state: &TwoPhotonState,
    theta: BasisAngle,
) -> DetectionProbabilities {
    let m = crate::polarization::hwp_matrix(theta).elems;
    // Output-channel amplitudes of the two modes: channel 1 sees row 0,
    // channel 2 sees row 1.
    let (t1h, t1v, t2h, t2v) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let sqrt2 = std::f64::consts::SQRT_2;
    match *state {
        TwoPhotonState::Indistinguishable {
            two_h,
            one_each,
            two_v,
        } => {
            let d_two_1 = two_h * t1h * t1h + one_each * sqrt2 * t1h * t1v + two_v * t1v * t1v;
            let d_coinc = two_h * sqrt2 * t1h * t2h
                + one_each * (t1h * t2v + t2h * t1v)
                + two_v * sqrt2 * t1v * t2v;
            let d_two_2 = two_h * t2h * t2h + one_each * sqrt2 * t2h * t2v + two_v * t2v * t2v;
            DetectionProbabilities {
                coincidence: d_coinc.norm_sqr(),
                bunched_1: d_two_1.norm_sqr(),
                bunched_2: d_two_2.norm_sqr(),
            }
        }
        TwoPhotonState::Distinguishable { amps } => {
            // out[k][l] = Σ_ij M[k][i] amps[i][j] M[l][j]: photon 1 into
            // channel k, photon 2 into channel l.
            let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
            for k in 0..2 {
                for l in 0..2 {
                    for (i, row) in amps.iter().enumerate() {
                        for (j, amp) in row.iter().enumerate() {
                            out[k][l] += m[k][i] * amp * m[l][j];
                        }
                    }
                }
            }
            DetectionProbabilities {
                coincidence: out[0][1].norm_sqr() + out[1][0].norm_sqr(),
                bunched_1: out[0][0].norm_sqr(),
                bunched_2: out[1][1].norm_sqr(),
            }
        }
    }
}

/// Coincidence probability of `state` analyzed at HWP angle `theta`.
pub fn coincidence(state: &TwoPhotonState, theta: BasisAngle) -> f64 {
    detection_probabilities(state, theta).coincidence
}

/// Interference visibility v = c_ind / c_dis − 1.
///
/// Zero means the identical photons behave like labelled ones; −1 is the
/// complete dip (coincidences fully suppressed); positive values are a peak
/// (coincidence enhancement), which requires polarization-dependent loss.
///
/// # Errors
/// [`Error::UndefinedVisibility`] if `c_dis` is zero;
/// [`Error::InvalidParameter`] if either rate is negative or non-finite.
pub fn visibility(c_ind: f64, c_dis: f64) -> Result<f64> {
    let check = |name: &'static str, value: f64| {
        if value.is_finite() && value >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name,
                requirement: "finite and non-negative",
                value,
            })
        }
    };
    check("c_ind", c_ind)?;
    check("c_dis", c_dis)?;
    if c_dis == 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok(c_ind / c_dis - 1.0)
}

/// Coincidence rates of the two distinguishability sectors and their
/// visibility, at one analysis angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceResult {
    /// Analysis HWP angle.
    pub theta: BasisAngle,
    /// Coincidence probability of the indistinguishable pair.
    pub c_ind: f64,
    /// Coincidence probability of the distinguishable pair.
    pub c_dis: f64,
    /// v = c_ind / c_dis − 1.
    pub visibility: f64,
}

impl CoincidenceResult {
    /// Serializes as single-record CSV with header
    /// `theta_rad,c_ind,c_dis,visibility`.
    pub fn to_csv(&self) -> String {
        format!(
            "theta_rad,c_ind,c_dis,visibility\n{},{},{},{}\n",
            self.theta.radians(),
            self.c_ind,
            self.c_dis,
            self.visibility
        )
    }
}

/// Full pipeline for the canonical A/D input pair: evolve both sectors a
/// distance `z` through the coupler, detect at angle `theta`, and form the
/// visibility.
///
/// # Errors
/// [`Error::InvalidDistance`] for a bad `z`; [`Error::UndefinedVisibility`]
/// when the distinguishable rate vanishes (e.g. θ a multiple of π/2 with one
/// mode fully extinguished).
pub fn predict_visibility(
    params: &CouplerParams,
    theta: BasisAngle,
    z: f64,
) -> Result<CoincidenceResult> {
    let ind = evolve(&input_state(PairKind::Indistinguishable), params, z)?;
    let dis = evolve(&input_state(PairKind::Distinguishable), params, z)?;
    let c_ind = coincidence(&ind, theta);
    let c_dis = coincidence(&dis, theta);
    Ok(CoincidenceResult {
        theta,
        c_ind,
        c_dis,
        visibility: visibility(c_ind, c_dis)?,
    })
}

/// Permanent of a square complex matrix by Ryser's inclusion–exclusion
/// formula: per(A) = (−1)ⁿ Σ_{∅≠S⊆cols} (−1)^{|S|} Π_i Σ_{j∈S} A_ij.
fn permanent(matrix: &[Vec<Complex64>]) -> Complex64 {
    let n = matrix.len();
    debug_assert!(matrix.iter().all(|row| row.len() == n));
    debug_assert!(n < 32);
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for subset in 1u32..(1 << n) {
        let mut product = Complex64::new(1.0, 0.0);
        for row in matrix {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, elem) in row.iter().enumerate() {
                if subset & (1 << j) != 0 {
                    acc += elem;
                }
            }
            product *= acc;
        }
        if (n as u32 - subset.count_ones()).is_multiple_of(2) {
            total += product;
        } else {
            total -= product;
        }
    }
    total
}

/// Pushes a two-photon state through an arbitrary 2×2 mode transfer matrix.
///
/// This is the general linear-optics rule and deliberately shares no algebra
/// with [`evolve`]/[`detection_probabilities`]: bosonic Fock amplitudes map
/// through matrix permanents of the transfer matrix with rows/columns
/// repeated per occupation (normalized by √(n_in! n_out!)), labelled
/// amplitudes through one copy of the matrix per photon. Feeding it the
/// coupler propagator must reproduce [`evolve`]; feeding it the analysis
/// matrix must reproduce the detection amplitudes.
pub fn two_photon_transfer(matrix: &JonesMatrix, state: &TwoPhotonState) -> TwoPhotonState {
    let t = &matrix.elems;
    match *state {
        TwoPhotonState::Indistinguishable {
            two_h,
            one_each,
            two_v,
        } => {
            // Occupation patterns over (H, V): the two mode indices each
            // photon sits in, plus the factorial normalization n_H!·n_V!.
            let patterns: [([usize; 2], f64); 3] = [([0, 0], 2.0), ([0, 1], 1.0), ([1, 1], 2.0)];
            let amps_in = [two_h, one_each, two_v];
            let mut amps_out = [Complex64::new(0.0, 0.0); 3];
            for (out_amp, (rows, mu_out)) in amps_out.iter_mut().zip(&patterns) {
                for (amp_in, (cols, mu_in)) in amps_in.iter().zip(&patterns) {
                    let sub = vec![
                        vec![t[rows[0]][cols[0]], t[rows[0]][cols[1]]],
                        vec![t[rows[1]][cols[0]], t[rows[1]][cols[1]]],
                    ];
                    *out_amp += amp_in * permanent(&sub) / (mu_out * mu_in).sqrt();
                }
            }
            TwoPhotonState::Indistinguishable {
                two_h: amps_out[0],
                one_each: amps_out[1],
                two_v: amps_out[2],
            }
        }
        TwoPhotonState::Distinguishable { amps } => {
            let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
            for (k, out_row) in out.iter_mut().enumerate() {
                for (l, out_amp) in out_row.iter_mut().enumerate() {
                    for (i, row) in amps.iter().enumerate() {
                        for (j, amp) in row.iter().enumerate() {
                            *out_amp += t[k][i] * amp * t[l][j];
                        }
                    }
                }
            }
            TwoPhotonState::Distinguishable { amps: out }
        }
    }
}
