//! Run configuration: a flat dotted-key text format, its defaults, and its
//! validation.
//!
//! A config file is a sequence of `key = value` lines. Blank lines and text
//! after `#` are ignored. Keys are flat with dotted section prefixes
//! (`coupler.gamma_h = 0.1035`); every key has a built-in default matching
//! the fabricated device, so a file only lists what it changes. Angle-valued
//! keys are stored in radians and also accept a `_deg` spelling
//! (`predict.theta_deg = 45`) converted on parse; giving both spellings of
//! one key is an error, as are unknown keys, duplicated keys, and values that
//! violate a field's range.
//!
//! [`RunConfig::canonical`] serializes back to the same format with a fixed
//! key order, radians for angles, and shortest round-trip float formatting,
//! so parse → serialize is idempotent on its own output.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use anyhow::{anyhow, bail, Result};
use homsim::homtrace::DelayModel;
use homsim::lattice::LatticeGeometry;
use homsim::polarization::{BasisAngle, CouplerParams};
use homsim::scan::linspace;

/// Default seed, fixed so runs are reproducible without any flags.
pub const DEFAULT_SEED: u64 = 42;

/// Everything a subcommand needs, with angles in radians, lengths in cm, loss
/// and hop rates in cm⁻¹, and delays in fs.
///
/// Fields mirror the config keys one to one; section prefixes become field
/// name prefixes only where needed to disambiguate (`lattice.z_max` →
/// `lattice_z_max`).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `seed` — reserved for synthetic-noise workflows; the current
    /// subcommands are fully deterministic and ignore it.
    pub seed: u64,
    /// `output.dir` — where artifacts land unless `--out` overrides it.
    pub output_dir: String,
    /// `coupler.gamma_h` — H loss rate, cm⁻¹.
    pub gamma_h: f64,
    /// `coupler.gamma_v` — V loss rate, cm⁻¹.
    pub gamma_v: f64,
    /// `coupler.length_z` — device length, cm.
    pub length_z: f64,
    /// `coupler.delta_beta_z` — birefringent phase Δβ·z accumulated over the
    /// full length, radians.
    pub delta_beta_z: f64,
    /// `lattice.n_sinks_per_side` — sinks in each array.
    pub n_sinks_per_side: usize,
    /// `lattice.couple_target_h` — target↔first-sink hop for H, cm⁻¹.
    pub couple_target_h: f64,
    /// `lattice.couple_target_v` — target↔first-sink hop for V, cm⁻¹.
    pub couple_target_v: f64,
    /// `lattice.couple_array_h` — sink↔sink hop for H, cm⁻¹.
    pub couple_array_h: f64,
    /// `lattice.couple_array_v` — sink↔sink hop for V, cm⁻¹.
    pub couple_array_v: f64,
    /// `lattice.two_sided` — arrays on both sides of the target.
    pub two_sided: bool,
    /// `lattice.z_max` — decay-curve extent, cm.
    pub lattice_z_max: f64,
    /// `lattice.n_steps` — decay-curve samples (both endpoints included).
    pub lattice_n_steps: usize,
    /// `delay.source_visibility` — source contrast scaling the dip/peak.
    pub source_visibility: f64,
    /// `delay.coherence_sigma_fs` — Gaussian width of the delay overlap, fs.
    pub coherence_sigma_fs: f64,
    /// `delay.tau_min_fs` — first delay sample, fs.
    pub tau_min_fs: f64,
    /// `delay.tau_max_fs` — last delay sample, fs.
    pub tau_max_fs: f64,
    /// `delay.tau_steps` — delay samples per trace.
    pub tau_steps: usize,
    /// `hom.theta_list` — analysis angles traced by `hom-trace`, radians.
    pub hom_theta_list: Vec<f64>,
    /// `scan.theta_min` — first analysis angle of the grid, radians.
    pub scan_theta_min: f64,
    /// `scan.theta_max` — last analysis angle of the grid, radians.
    pub scan_theta_max: f64,
    /// `scan.theta_steps` — angle samples of the grid.
    pub scan_theta_steps: usize,
    /// `scan.phase_min` — first accumulated phase of the grid, radians.
    pub scan_phase_min: f64,
    /// `scan.phase_max` — last accumulated phase of the grid, radians.
    pub scan_phase_max: f64,
    /// `scan.phase_steps` — phase samples of the grid.
    pub scan_phase_steps: usize,
    /// `scan.source_visibility_factor` — optional contrast multiplied onto
    /// every defined grid cell; absent means the ideal grid.
    pub scan_source_visibility_factor: Option<f64>,
    /// `predict.theta` — analysis angle for `predict`, radians.
    pub predict_theta: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            output_dir: "build/out".to_string(),
            gamma_h: 0.1035,
            gamma_v: 0.02433,
            length_z: 15.0,
            delta_beta_z: 0.0,
            n_sinks_per_side: 40,
            couple_target_h: 0.154,
            couple_target_v: 0.065,
            couple_array_h: 0.551,
            couple_array_v: 0.335,
            two_sided: true,
            lattice_z_max: 15.0,
            lattice_n_steps: 301,
            source_visibility: 0.972,
            coherence_sigma_fs: 300.0,
            tau_min_fs: -1200.0,
            tau_max_fs: 1200.0,
            tau_steps: 241,
            hom_theta_list: [0.0f64, 9.0, 18.0, 27.0, 36.0, 45.0]
                .into_iter()
                .map(f64::to_radians)
                .collect(),
            scan_theta_min: 0.0,
            scan_theta_max: FRAC_PI_2,
            scan_theta_steps: 91,
            scan_phase_min: 0.0,
            scan_phase_max: FRAC_PI_2,
            scan_phase_steps: 91,
            scan_source_visibility_factor: None,
            predict_theta: FRAC_PI_4,
        }
    }
}

impl RunConfig {
    /// Parses config text, applies `(key, value)` overrides on top (an
    /// override replaces the file's value for that key), then validates.
    ///
    /// # Errors
    /// Malformed lines, unknown/duplicate keys, unparsable values, and values
    /// outside a field's range all fail with a message naming the offending
    /// key (and line, where there is one).
    pub fn parse_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut map = raw_map(text)?;
        for (key, value) in overrides {
            // Overriding either spelling of an angle key supersedes the other
            // spelling too, so `--set predict.theta_deg=18` works against a
            // file that sets `predict.theta` in radians.
            match key.strip_suffix("_deg") {
                Some(base) => map.remove(base),
                None => map.remove(&format!("{key}_deg")),
            };
            map.insert(key.clone(), value.clone());
        }
        Self::from_map(map)
    }

    fn from_map(map: BTreeMap<String, String>) -> Result<Self> {
        let mut ex = Extractor { map };
        let d = RunConfig::default();
        let config = RunConfig {
            seed: ex.take_u64("seed", d.seed)?,
            output_dir: ex.take_string("output.dir", &d.output_dir)?,
            gamma_h: ex.take_f64("coupler.gamma_h", d.gamma_h)?,
            gamma_v: ex.take_f64("coupler.gamma_v", d.gamma_v)?,
            length_z: ex.take_f64("coupler.length_z", d.length_z)?,
            delta_beta_z: ex.take_angle("coupler.delta_beta_z", d.delta_beta_z)?,
            n_sinks_per_side: ex.take_usize("lattice.n_sinks_per_side", d.n_sinks_per_side)?,
            couple_target_h: ex.take_f64("lattice.couple_target_h", d.couple_target_h)?,
            couple_target_v: ex.take_f64("lattice.couple_target_v", d.couple_target_v)?,
            couple_array_h: ex.take_f64("lattice.couple_array_h", d.couple_array_h)?,
            couple_array_v: ex.take_f64("lattice.couple_array_v", d.couple_array_v)?,
            two_sided: ex.take_bool("lattice.two_sided", d.two_sided)?,
            lattice_z_max: ex.take_f64("lattice.z_max", d.lattice_z_max)?,
            lattice_n_steps: ex.take_usize("lattice.n_steps", d.lattice_n_steps)?,
            source_visibility: ex.take_f64("delay.source_visibility", d.source_visibility)?,
            coherence_sigma_fs: ex.take_f64("delay.coherence_sigma_fs", d.coherence_sigma_fs)?,
            tau_min_fs: ex.take_f64("delay.tau_min_fs", d.tau_min_fs)?,
            tau_max_fs: ex.take_f64("delay.tau_max_fs", d.tau_max_fs)?,
            tau_steps: ex.take_usize("delay.tau_steps", d.tau_steps)?,
            hom_theta_list: ex.take_angle_list("hom.theta_list", &d.hom_theta_list)?,
            scan_theta_min: ex.take_angle("scan.theta_min", d.scan_theta_min)?,
            scan_theta_max: ex.take_angle("scan.theta_max", d.scan_theta_max)?,
            scan_theta_steps: ex.take_usize("scan.theta_steps", d.scan_theta_steps)?,
            scan_phase_min: ex.take_angle("scan.phase_min", d.scan_phase_min)?,
            scan_phase_max: ex.take_angle("scan.phase_max", d.scan_phase_max)?,
            scan_phase_steps: ex.take_usize("scan.phase_steps", d.scan_phase_steps)?,
            scan_source_visibility_factor: ex.take_opt_f64("scan.source_visibility_factor")?,
            predict_theta: ex.take_angle("predict.theta", d.predict_theta)?,
        };
        ex.expect_empty()?;
        config.validate()?;
        Ok(config)
    }

    /// Checks every field against its range and the owning type's invariants,
    /// naming the offending config key on failure.
    fn validate(&self) -> Result<()> {
        self.coupler_params()?;
        self.geometry()?;
        self.delay_model()?;
        require(
            self.lattice_z_max.is_finite() && self.lattice_z_max > 0.0,
            "lattice.z_max",
            "positive and finite",
            &self.lattice_z_max,
        )?;
        require(
            self.lattice_n_steps >= 2,
            "lattice.n_steps",
            "at least 2",
            &self.lattice_n_steps,
        )?;
        require(
            self.tau_min_fs.is_finite(),
            "delay.tau_min_fs",
            "finite",
            &self.tau_min_fs,
        )?;
        require(
            self.tau_max_fs.is_finite() && self.tau_max_fs >= self.tau_min_fs,
            "delay.tau_max_fs",
            "finite and at least delay.tau_min_fs",
            &self.tau_max_fs,
        )?;
        require(
            self.tau_steps >= 1,
            "delay.tau_steps",
            "at least 1",
            &self.tau_steps,
        )?;
        if self.hom_theta_list.is_empty() {
            bail!("config key hom.theta_list must contain at least one angle");
        }
        if let Some(&bad) = self.hom_theta_list.iter().find(|t| !t.is_finite()) {
            return Err(key_error("hom.theta_list", "a list of finite angles", &bad));
        }
        require(
            self.scan_theta_min.is_finite(),
            "scan.theta_min",
            "finite",
            &self.scan_theta_min,
        )?;
        require(
            self.scan_theta_max.is_finite(),
            "scan.theta_max",
            "finite",
            &self.scan_theta_max,
        )?;
        require(
            self.scan_theta_steps >= 1,
            "scan.theta_steps",
            "at least 1",
            &self.scan_theta_steps,
        )?;
        require(
            self.scan_phase_min.is_finite(),
            "scan.phase_min",
            "finite",
            &self.scan_phase_min,
        )?;
        require(
            self.scan_phase_max.is_finite(),
            "scan.phase_max",
            "finite",
            &self.scan_phase_max,
        )?;
        require(
            self.scan_phase_steps >= 1,
            "scan.phase_steps",
            "at least 1",
            &self.scan_phase_steps,
        )?;
        if let Some(factor) = self.scan_source_visibility_factor {
            require(
                factor.is_finite() && (0.0..=1.0).contains(&factor),
                "scan.source_visibility_factor",
                "within [0, 1]",
                &factor,
            )?;
        }
        require(
            self.predict_theta.is_finite(),
            "predict.theta",
            "finite",
            &self.predict_theta,
        )?;
        if self.output_dir.is_empty() {
            bail!("config key output.dir must not be empty");
        }
        Ok(())
    }

    /// Serializes to the canonical config text: every key present, fixed
    /// order, angles in radians. Parsing this text reproduces `self` exactly,
    /// and serializing that parse reproduces this text byte for byte.
    pub fn canonical(&self) -> String {
        let theta_list = self
            .hom_theta_list
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let mut lines = vec![
            format!("seed = {}", self.seed),
            format!("output.dir = {}", self.output_dir),
            format!("coupler.gamma_h = {}", self.gamma_h),
            format!("coupler.gamma_v = {}", self.gamma_v),
            format!("coupler.length_z = {}", self.length_z),
            format!("coupler.delta_beta_z = {}", self.delta_beta_z),
            format!("lattice.n_sinks_per_side = {}", self.n_sinks_per_side),
            format!("lattice.couple_target_h = {}", self.couple_target_h),
            format!("lattice.couple_target_v = {}", self.couple_target_v),
            format!("lattice.couple_array_h = {}", self.couple_array_h),
            format!("lattice.couple_array_v = {}", self.couple_array_v),
            format!("lattice.two_sided = {}", self.two_sided),
            format!("lattice.z_max = {}", self.lattice_z_max),
            format!("lattice.n_steps = {}", self.lattice_n_steps),
            format!("delay.source_visibility = {}", self.source_visibility),
            format!("delay.coherence_sigma_fs = {}", self.coherence_sigma_fs),
            format!("delay.tau_min_fs = {}", self.tau_min_fs),
            format!("delay.tau_max_fs = {}", self.tau_max_fs),
            format!("delay.tau_steps = {}", self.tau_steps),
            format!("hom.theta_list = {theta_list}"),
            format!("scan.theta_min = {}", self.scan_theta_min),
            format!("scan.theta_max = {}", self.scan_theta_max),
            format!("scan.theta_steps = {}", self.scan_theta_steps),
            format!("scan.phase_min = {}", self.scan_phase_min),
            format!("scan.phase_max = {}", self.scan_phase_max),
            format!("scan.phase_steps = {}", self.scan_phase_steps),
        ];
        if let Some(factor) = self.scan_source_visibility_factor {
            lines.push(format!("scan.source_visibility_factor = {factor}"));
        }
        lines.push(format!("predict.theta = {}", self.predict_theta));
        lines.join("\n") + "\n"
    }

    /// Coupler parameters with β̄ = 0 and Δβ retuned so the accumulated phase
    /// over the full length equals `coupler.delta_beta_z`.
    pub fn coupler_params(&self) -> Result<CouplerParams> {
        let base = CouplerParams::new(0.0, 0.0, self.gamma_h, self.gamma_v, self.length_z)
            .map_err(|e| anyhow!("config key coupler.{e}"))?;
        if self.length_z == 0.0 && self.delta_beta_z != 0.0 {
            bail!(
                "config key coupler.delta_beta_z must be zero when coupler.length_z is zero, \
                 got {}",
                self.delta_beta_z
            );
        }
        base.with_accumulated_phase(self.delta_beta_z)
            .map_err(|e| anyhow!("config key coupler.delta_beta_z is invalid: {e}"))
    }

    /// The sink-array geometry.
    pub fn geometry(&self) -> Result<LatticeGeometry> {
        LatticeGeometry::new(
            self.n_sinks_per_side,
            self.couple_target_h,
            self.couple_target_v,
            self.couple_array_h,
            self.couple_array_v,
            self.two_sided,
        )
        .map_err(|e| anyhow!("config key lattice.{e}"))
    }

    /// The delay-overlap model.
    pub fn delay_model(&self) -> Result<DelayModel> {
        DelayModel::new(self.source_visibility, self.coherence_sigma_fs)
            .map_err(|e| anyhow!("config key delay.{e}"))
    }

    /// Uniform delay grid `[tau_min_fs, tau_max_fs]` with `tau_steps` points.
    pub fn tau_grid(&self) -> Vec<f64> {
        linspace(self.tau_min_fs, self.tau_max_fs, self.tau_steps)
    }

    /// Uniform analysis-angle axis of the scan grid.
    pub fn theta_axis(&self) -> Vec<f64> {
        linspace(self.scan_theta_min, self.scan_theta_max, self.scan_theta_steps)
    }

    /// Uniform accumulated-phase axis of the scan grid.
    pub fn phase_axis(&self) -> Vec<f64> {
        linspace(self.scan_phase_min, self.scan_phase_max, self.scan_phase_steps)
    }

    /// The `hom-trace` analysis angles.
    pub fn hom_angles(&self) -> Vec<BasisAngle> {
        self.hom_theta_list
            .iter()
            .map(|&t| BasisAngle::from_radians(t))
            .collect()
    }

    /// The `predict` analysis angle.
    pub fn predict_angle(&self) -> BasisAngle {
        BasisAngle::from_radians(self.predict_theta)
    }
}

/// Splits a `--set KEY=VALUE` argument into its parts.
///
/// # Errors
/// Fails when there is no `=` or the key side is empty.
pub fn parse_override(assignment: &str) -> Result<(String, String)> {
    let Some((key, value)) = assignment.split_once('=') else {
        bail!("override `{assignment}` must have the form KEY=VALUE");
    };
    let key = key.trim();
    if key.is_empty() {
        bail!("override `{assignment}` must have the form KEY=VALUE");
    }
    Ok((key.to_string(), value.trim().to_string()))
}

/// Reads config text into a key → value map, rejecting malformed lines and
/// duplicate keys with the line number.
fn raw_map(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!(
                "config line {}: expected `key = value`, got `{line}`",
                idx + 1
            );
        };
        let key = key.trim().to_string();
        if key.is_empty() {
            bail!("config line {}: missing key before `=`", idx + 1);
        }
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            bail!("config line {}: duplicate key `{key}`", idx + 1);
        }
    }
    Ok(map)
}

fn key_error(key: &str, requirement: &str, value: &dyn std::fmt::Display) -> anyhow::Error {
    anyhow!("config key {key} must be {requirement}, got {value}")
}

fn require(ok: bool, key: &str, requirement: &str, value: &dyn std::fmt::Display) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(key_error(key, requirement, value))
    }
}

fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    raw.parse::<f64>()
        .map_err(|_| anyhow!("config key {key} expects a number, got `{raw}`"))
}

fn parse_f64_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|part| parse_f64(key, part.trim()))
        .collect()
}

/// Pulls typed values out of the raw map, consuming keys as it goes so that
/// whatever remains at the end is unknown by construction.
struct Extractor {
    map: BTreeMap<String, String>,
}

impl Extractor {
    fn take_f64(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.map.remove(key) {
            Some(raw) => parse_f64(key, &raw),
            None => Ok(default),
        }
    }

    fn take_opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.map.remove(key).map(|raw| parse_f64(key, &raw)).transpose()
    }

    fn take_u64(&mut self, key: &str, default: u64) -> Result<u64> {
        match self.map.remove(key) {
            Some(raw) => raw
                .parse::<u64>()
                .map_err(|_| anyhow!("config key {key} expects an unsigned integer, got `{raw}`")),
            None => Ok(default),
        }
    }

    fn take_usize(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.map.remove(key) {
            Some(raw) => raw
                .parse::<usize>()
                .map_err(|_| anyhow!("config key {key} expects an unsigned integer, got `{raw}`")),
            None => Ok(default),
        }
    }

    fn take_bool(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.map.remove(key).as_deref() {
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(raw) => bail!("config key {key} expects true or false, got `{raw}`"),
            None => Ok(default),
        }
    }

    fn take_string(&mut self, key: &str, default: &str) -> Result<String> {
        Ok(self.map.remove(key).unwrap_or_else(|| default.to_string()))
    }

    /// An angle key with an optional `_deg` spelling; exactly one of the two
    /// may appear.
    fn take_angle(&mut self, key: &str, default_rad: f64) -> Result<f64> {
        let deg_key = format!("{key}_deg");
        match (self.map.remove(key), self.map.remove(&deg_key)) {
            (Some(_), Some(_)) => {
                bail!("config keys {key} and {deg_key} are mutually exclusive")
            }
            (Some(raw), None) => parse_f64(key, &raw),
            (None, Some(raw)) => Ok(parse_f64(&deg_key, &raw)?.to_radians()),
            (None, None) => Ok(default_rad),
        }
    }

    /// A comma-separated angle list with an optional `_deg` spelling.
    fn take_angle_list(&mut self, key: &str, default_rad: &[f64]) -> Result<Vec<f64>> {
        let deg_key = format!("{key}_deg");
        match (self.map.remove(key), self.map.remove(&deg_key)) {
            (Some(_), Some(_)) => {
                bail!("config keys {key} and {deg_key} are mutually exclusive")
            }
            (Some(raw), None) => parse_f64_list(key, &raw),
            (None, Some(raw)) => Ok(parse_f64_list(&deg_key, &raw)?
                .into_iter()
                .map(f64::to_radians)
                .collect()),
            (None, None) => Ok(default_rad.to_vec()),
        }
    }

    /// Fails if any key was never consumed — i.e. is not part of the schema.
    fn expect_empty(self) -> Result<()> {
        if self.map.is_empty() {
            return Ok(());
        }
        let keys = self
            .map
            .keys()
            .map(|k| format!("`{k}`"))
            .collect::<Vec<_>>()
            .join(", ");
        let plural = if self.map.len() == 1 { "" } else { "s" };
        bail!("unknown config key{plural} {keys}");
    }
}
