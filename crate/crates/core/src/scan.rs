//! Parameter sweeps: visibility over a θ × phase grid and families of delay
//! traces.
//!
//! Every cell of a sweep is an independent pure computation, so the sweeps
//! run data-parallel when the `parallel` feature is enabled (the default) and
//! fall back to plain iteration without it; either way cells are produced in
//! a fixed row-major order and the output is bit-identical.
//!
//! The phase axis of the visibility grid is realized by retuning the
//! birefringent splitting Δβ at fixed device length, which is how the
//! accumulated phase Δβ·z is controlled in practice; the loss rates are left
//! untouched. Cells where the visibility is undefined (the distinguishable
//! coincidence rate vanishes, e.g. a fully extinguished mode analyzed at
//! θ = 0) are recorded as undefined rather than clamped or skipped.

use crate::biphoton::predict_visibility;
use crate::error::{Error, Result};
use crate::exec;
use crate::homtrace::{hom_trace, DelayModel, HomTrace};
use crate::polarization::{BasisAngle, CouplerParams};

/// Number of points per axis in the default θ × phase grid.
pub const DEFAULT_AXIS_POINTS: usize = 91;

/// `n` points spanning `[lo, hi]` inclusive (a single point sits at `lo`).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// The default sweep axes: θ and phase both spanning [0, π/2] in
/// [`DEFAULT_AXIS_POINTS`] points.
pub fn default_axes() -> (Vec<f64>, Vec<f64>) {
    let axis = linspace(0.0, std::f64::consts::FRAC_PI_2, DEFAULT_AXIS_POINTS);
    (axis.clone(), axis)
}

/// Visibility sampled over analysis angle (rows) × accumulated phase
/// (columns). Cells hold `None` where the visibility is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityGrid {
    theta_axis: Vec<f64>,
    phase_axis: Vec<f64>,
    /// Row-major: `values[i * phase_axis.len() + j]` is (θ_i, phase_j).
    values: Vec<Option<f64>>,
}

impl VisibilityGrid {
    /// The analysis-angle axis, radians.
    pub fn theta_axis(&self) -> &[f64] {
        &self.theta_axis
    }

    /// The accumulated-phase axis, radians.
    pub fn phase_axis(&self) -> &[f64] {
        &self.phase_axis
    }

    /// The cell at angle index `i`, phase index `j`; `None` when the
    /// visibility is undefined there. Panics if an index is out of range.
    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        assert!(i < self.theta_axis.len() && j < self.phase_axis.len());
        self.values[i * self.phase_axis.len() + j]
    }

    /// One row of cells (fixed θ, phase varying).
    pub fn row(&self, i: usize) -> &[Option<f64>] {
        let np = self.phase_axis.len();
        &self.values[i * np..(i + 1) * np]
    }

    /// A copy with every defined cell multiplied by `factor` — used to
    /// overlay an imperfect-source contrast onto the ideal grid for
    /// comparison against measured data. Undefined cells stay undefined.
    pub fn scaled(&self, factor: f64) -> VisibilityGrid {
        VisibilityGrid {
            theta_axis: self.theta_axis.clone(),
            phase_axis: self.phase_axis.clone(),
            values: self.values.iter().map(|v| v.map(|x| x * factor)).collect(),
        }
    }

    /// Max − min of the defined cells in row `i`: how strongly the phase
    /// modulates the visibility at that analysis angle. `None` if the row has
    /// no defined cells.
    pub fn spread_over_phase(&self, i: usize) -> Option<f64> {
        let defined: Vec<f64> = self.row(i).iter().flatten().copied().collect();
        let max = defined.iter().copied().reduce(f64::max)?;
        let min = defined.iter().copied().reduce(f64::min)?;
        Some(max - min)
    }

    /// Serializes the grid as CSV with header `theta_rad,phase_rad,visibility`
    /// in row-major order (θ outer, phase inner); undefined cells print as
    /// `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta_rad,phase_rad,visibility\n");
        for (i, &theta) in self.theta_axis.iter().enumerate() {
            for (j, &phase) in self.phase_axis.iter().enumerate() {
                match self.value(i, j) {
                    Some(v) => out.push_str(&format!("{theta},{phase},{v}\n")),
                    None => out.push_str(&format!("{theta},{phase},nan\n")),
                }
            }
        }
        out
    }
}

/// Sweeps the visibility of the canonical pair over `theta_axis` ×
/// `phase_axis`. Each cell retunes Δβ of `base` so the accumulated phase over
/// its length equals the cell's phase, evolves over the full length, and
/// analyzes at the cell's θ.
///
/// # Errors
/// [`Error::EmptyAxis`] for an empty axis; [`Error::InvalidParameter`] for a
/// non-finite axis value or a non-positive base length (a phase axis cannot
/// be realized at zero length).
pub fn visibility_grid(
    base: &CouplerParams,
    theta_axis: &[f64],
    phase_axis: &[f64],
) -> Result<VisibilityGrid> {
    if theta_axis.is_empty() {
        return Err(Error::EmptyAxis("theta"));
    }
    if phase_axis.is_empty() {
        return Err(Error::EmptyAxis("phase"));
    }
    for (name, axis) in [("theta", theta_axis), ("phase", phase_axis)] {
        if let Some(&bad) = axis.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                requirement: "finite",
                value: bad,
            });
        }
    }
    if base.length_z <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "length_z",
            requirement: "positive to realize a phase axis",
            value: base.length_z,
        });
    }
    let np = phase_axis.len();
    let cells = exec::map_range(theta_axis.len() * np, |idx| -> Result<Option<f64>> {
        let (i, j) = (idx / np, idx % np);
        let params = base.with_accumulated_phase(phase_axis[j])?;
        match predict_visibility(
            &params,
            BasisAngle::from_radians(theta_axis[i]),
            params.length_z,
        ) {
            Ok(r) => Ok(Some(r.visibility)),
            Err(Error::UndefinedVisibility) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let values = cells.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(VisibilityGrid {
        theta_axis: theta_axis.to_vec(),
        phase_axis: phase_axis.to_vec(),
        values,
    })
}

/// Computes one delay trace per analysis angle in `thetas`, in order.
///
/// # Errors
/// [`Error::EmptyAxis`] if `thetas` is empty; everything [`hom_trace`] can
/// raise, for the first failing angle.
pub fn hom_family(
    params: &CouplerParams,
    thetas: &[BasisAngle],
    model: &DelayModel,
    tau_grid: &[f64],
) -> Result<Vec<HomTrace>> {
    if thetas.is_empty() {
        return Err(Error::EmptyAxis("theta"));
    }
    let traces = exec::map_range(thetas.len(), |i| hom_trace(params, thetas[i], model, tau_grid));
    traces.into_iter().collect()
}
