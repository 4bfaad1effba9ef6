//! Single-photon polarization optics for the lossy birefringent coupler.
//!
//! States live in the two-dimensional Jones space spanned by the horizontal
//! (H) and vertical (V) waveguide modes. Propagation through the coupler is
//! diagonal in that basis but non-unitary: each mode accumulates a phase
//! e^{-i β z} *and* an amplitude decay e^{-γ z}, with mode-dependent β and γ.
//! Measurement happens behind a half-wave plate (HWP) followed by a polarizing
//! beam splitter, so the observation basis is set by the HWP angle θ.
//!
//! Conventions:
//! * component order is (amp_h, amp_v);
//! * the diagonal (D) and antidiagonal (A) states are D = (H + V)/√2 and
//!   A = (V − H)/√2;
//! * the propagation phasor is e^{-i β z} (phase decreases along +z);
//! * the splitting parameters are β̄ = (β_V + β_H)/2, Δβ = (β_V − β_H)/2,
//!   γ̄ = (γ_H + γ_V)/2, Δγ = (γ_H − γ_V)/2, so that a lossless D input
//!   oscillates into A with probability sin²(Δβ z).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The four named single-photon polarization states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisState {
    /// Horizontal, (1, 0).
    H,
    /// Vertical, (0, 1).
    V,
    /// Diagonal, (1, 1)/√2.
    D,
    /// Antidiagonal, (−1, 1)/√2.
    A,
}

impl BasisState {
    /// The Jones vector of this basis state.
    pub fn vector(self) -> PolarizationVector {
        let re = |x: f64| Complex64::new(x, 0.0);
        match self {
            BasisState::H => PolarizationVector::new(re(1.0), re(0.0)),
            BasisState::V => PolarizationVector::new(re(0.0), re(1.0)),
            BasisState::D => PolarizationVector::new(re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)),
            BasisState::A => PolarizationVector::new(re(-FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)),
        }
    }
}

impl FromStr for BasisState {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        match name {
            "H" | "h" => Ok(BasisState::H),
            "V" | "v" => Ok(BasisState::V),
            "D" | "d" => Ok(BasisState::D),
            "A" | "a" => Ok(BasisState::A),
            other => Err(Error::UnknownBasis(other.to_string())),
        }
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BasisState::H => "H",
            BasisState::V => "V",
            BasisState::D => "D",
            BasisState::A => "A",
        };
        write!(f, "{name}")
    }
}

/// Looks up a named basis state (`"H"`, `"V"`, `"D"`, `"A"`, case-insensitive)
/// and returns its Jones vector.
///
/// # Errors
/// [`Error::UnknownBasis`] for any other name.
pub fn basis_state(name: &str) -> Result<PolarizationVector> {
    name.parse::<BasisState>().map(BasisState::vector)
}

/// A (possibly sub-normalized) Jones vector, components ordered (H, V).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationVector {
    /// Amplitude on the horizontal mode.
    pub amp_h: Complex64,
    /// Amplitude on the vertical mode.
    pub amp_v: Complex64,
}

impl PolarizationVector {
    /// Builds a vector from its two mode amplitudes.
    pub fn new(amp_h: Complex64, amp_v: Complex64) -> Self {
        Self { amp_h, amp_v }
    }

    /// Squared norm |amp_h|² + |amp_v|²; the survival probability of a photon
    /// that started normalized.
    pub fn norm_sqr(&self) -> f64 {
        self.amp_h.norm_sqr() + self.amp_v.norm_sqr()
    }

    /// Inner product ⟨self|other⟩ (self is conjugated).
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amp_h.conj() * other.amp_h + self.amp_v.conj() * other.amp_v
    }

    /// Projection probability |⟨self|other⟩|².
    pub fn overlap_prob(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// Measurement-basis angle of the half-wave plate, in radians.
///
/// θ = 0 analyzes in the H/V basis, θ = π/4 in the D/A basis; the physical
/// basis repeats with period π/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisAngle {
    radians: f64,
}

impl BasisAngle {
    /// θ = 0: the polarizing beam splitter sees H and V directly.
    pub const HV: Self = Self { radians: 0.0 };
    /// θ = π/4: channel 1 projects onto D, channel 2 onto A.
    pub const AD: Self = Self { radians: FRAC_PI_4 };

    /// Builds an angle from radians.
    pub fn from_radians(radians: f64) -> Self {
        Self { radians }
    }

    /// Builds an angle from degrees.
    pub fn from_degrees(degrees: f64) -> Self {
        Self {
            radians: degrees.to_radians(),
        }
    }

    /// The angle in radians, exactly as constructed.
    pub fn radians(self) -> f64 {
        self.radians
    }

    /// The angle in degrees.
    pub fn degrees(self) -> f64 {
        self.radians.to_degrees()
    }

    /// The equivalent angle folded into the fundamental interval [0, π/2).
    pub fn canonical(self) -> Self {
        Self {
            radians: self.radians.rem_euclid(FRAC_PI_2),
        }
    }
}

/// Physical parameters of the birefringent, dichroic coupler.
///
/// `beta_*` are propagation constants (phase per cm), `gamma_*` amplitude loss
/// rates (per cm), `length_z` the device length (cm). Invariants: the loss
/// rates and the length are finite and non-negative; the propagation constants
/// are finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerParams {
    /// Propagation constant of the H mode, cm⁻¹.
    pub beta_h: f64,
    /// Propagation constant of the V mode, cm⁻¹.
    pub beta_v: f64,
    /// Amplitude loss rate of the H mode, cm⁻¹.
    pub gamma_h: f64,
    /// Amplitude loss rate of the V mode, cm⁻¹.
    pub gamma_v: f64,
    /// Device length, cm.
    pub length_z: f64,
}

impl CouplerParams {
    /// Builds and validates a parameter set.
    ///
    /// # Errors
    /// [`Error::InvalidParameter`] if a loss rate or the length is negative,
    /// or any field is non-finite.
    pub fn new(
        beta_h: f64,
        beta_v: f64,
        gamma_h: f64,
        gamma_v: f64,
        length_z: f64,
    ) -> Result<Self> {
        let finite = |name: &'static str, value: f64| {
            if value.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    requirement: "finite",
                    value,
                })
            }
        };
        finite("beta_h", beta_h)?;
        finite("beta_v", beta_v)?;
        let non_negative = |name: &'static str, value: f64| {
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
        non_negative("gamma_h", gamma_h)?;
        non_negative("gamma_v", gamma_v)?;
        non_negative("length_z", length_z)?;
        Ok(Self {
            beta_h,
            beta_v,
            gamma_h,
            gamma_v,
            length_z,
        })
    }

    /// A lossless coupler with symmetric birefringence: β̄ = 0, so
    /// β_V = +delta_beta and β_H = −delta_beta.
    pub fn lossless(delta_beta: f64, length_z: f64) -> Result<Self> {
        Self::new(-delta_beta, delta_beta, 0.0, 0.0, length_z)
    }

    /// Returns a copy whose birefringence is retuned so the phase Δβ·z
    /// accumulated over the full device length equals `phase`, keeping β̄ and
    /// the loss rates unchanged.
    ///
    /// # Errors
    /// [`Error::InvalidParameter`] if `phase` is non-finite, or if the length
    /// is zero while `phase` is not (no finite Δβ can realize it).
    pub fn with_accumulated_phase(self, phase: f64) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phase",
                requirement: "finite",
                value: phase,
            });
        }
        if self.length_z == 0.0 && phase != 0.0 {
            return Err(Error::InvalidParameter {
                name: "phase",
                requirement: "zero when the device length is zero",
                value: phase,
            });
        }
        let delta_beta = if phase == 0.0 {
            0.0
        } else {
            phase / self.length_z
        };
        let mean = self.mean_beta();
        Self::new(
            mean - delta_beta,
            mean + delta_beta,
            self.gamma_h,
            self.gamma_v,
            self.length_z,
        )
    }

    /// Mean propagation constant β̄ = (β_V + β_H)/2.
    pub fn mean_beta(&self) -> f64 {
        0.5 * (self.beta_v + self.beta_h)
    }

    /// Birefringent splitting Δβ = (β_V − β_H)/2.
    pub fn delta_beta(&self) -> f64 {
        0.5 * (self.beta_v - self.beta_h)
    }

    /// Mean loss rate γ̄ = (γ_H + γ_V)/2.
    pub fn mean_gamma(&self) -> f64 {
        0.5 * (self.gamma_h + self.gamma_v)
    }

    /// Dichroic splitting Δγ = (γ_H − γ_V)/2 (positive when H is lossier).
    pub fn delta_gamma(&self) -> f64 {
        0.5 * (self.gamma_h - self.gamma_v)
    }

    /// Phase Δβ·z accumulated between the modes over the full device length.
    pub fn accumulated_phase(&self) -> f64 {
        self.delta_beta() * self.length_z
    }

    /// Splits the raw mode parameters into mean and difference components.
    pub fn decompose(&self) -> CouplerDecomposition {
        CouplerDecomposition {
            mean_beta: self.mean_beta(),
            delta_beta: self.delta_beta(),
            mean_gamma: self.mean_gamma(),
            delta_gamma: self.delta_gamma(),
        }
    }
}

/// Mean/difference decomposition of the coupler parameters.
///
/// The raw rates are recovered as β_H = β̄ − Δβ, β_V = β̄ + Δβ,
/// γ_H = γ̄ + Δγ, γ_V = γ̄ − Δγ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerDecomposition {
    /// β̄, the polarization-averaged propagation constant.
    pub mean_beta: f64,
    /// Δβ, half the V−H propagation-constant difference.
    pub delta_beta: f64,
    /// γ̄, the polarization-averaged loss rate.
    pub mean_gamma: f64,
    /// Δγ, half the H−V loss-rate difference.
    pub delta_gamma: f64,
}

/// A 2×2 complex Jones matrix acting on (amp_h, amp_v) vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix {
    /// Row-major elements: `elems[row][col]`.
    pub elems: [[Complex64; 2]; 2],
}

impl JonesMatrix {
    /// Builds a matrix from row-major elements.
    pub fn new(elems: [[Complex64; 2]; 2]) -> Self {
        Self { elems }
    }

    /// The identity matrix.
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new([[one, zero], [zero, one]])
    }

    /// Element accessor, `row` and `col` in {0, 1}.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elems[row][col]
    }

    /// Applies the matrix to a Jones vector.
    pub fn apply(&self, v: &PolarizationVector) -> PolarizationVector {
        PolarizationVector::new(
            self.elems[0][0] * v.amp_h + self.elems[0][1] * v.amp_v,
            self.elems[1][0] * v.amp_h + self.elems[1][1] * v.amp_v,
        )
    }

    /// Determinant.
    pub fn det(&self) -> Complex64 {
        self.elems[0][0] * self.elems[1][1] - self.elems[0][1] * self.elems[1][0]
    }
}

impl Mul for JonesMatrix {
    type Output = JonesMatrix;

    fn mul(self, rhs: JonesMatrix) -> JonesMatrix {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, out_row) in out.iter_mut().enumerate() {
            for (c, out_elem) in out_row.iter_mut().enumerate() {
                *out_elem =
                    self.elems[r][0] * rhs.elems[0][c] + self.elems[r][1] * rhs.elems[1][c];
            }
        }
        JonesMatrix::new(out)
    }
}

impl Mul<PolarizationVector> for JonesMatrix {
    type Output = PolarizationVector;

    fn mul(self, rhs: PolarizationVector) -> PolarizationVector {
        self.apply(&rhs)
    }
}

/// The coupler propagator over a distance `z`:
/// diag(e^{−i β_H z − γ_H z}, e^{−i β_V z − γ_V z}).
///
/// Diagonal in the H/V basis and non-unitary whenever a loss rate is nonzero;
/// the squared norm of any input state is non-increasing in `z`.
///
/// # Errors
/// [`Error::InvalidDistance`] if `z` is negative or non-finite.
pub fn propagator(params: &CouplerParams, z: f64) -> Result<JonesMatrix> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::InvalidDistance(z));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mode = |beta: f64, gamma: f64| Complex64::new(-gamma * z, -beta * z).exp();
    Ok(JonesMatrix::new([
        [mode(params.beta_h, params.gamma_h), zero],
        [zero, mode(params.beta_v, params.gamma_v)],
    ]))
}

/// The half-wave-plate/polarizing-beam-splitter analysis matrix at HWP angle
/// θ:
///
/// ```text
/// [ cos θ   sin θ ]
/// [ sin θ  −cos θ ]
/// ```
///
/// Row 0 is the mode routed to output channel 1 of the splitter, row 1 the
/// mode routed to channel 2. The matrix is real, symmetric, orthogonal, its
/// own inverse, and has determinant −1.
pub fn hwp_matrix(theta: BasisAngle) -> JonesMatrix {
    let (sin, cos) = theta.radians().sin_cos();
    let re = |x: f64| Complex64::new(x, 0.0);
    JonesMatrix::new([[re(cos), re(sin)], [re(sin), re(-cos)]])
}
