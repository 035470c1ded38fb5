//! Experiment scenario: geometry, band plan, propagation, power and solver constants.
//!
//! The file format is TOML. Every key is optional; absent keys take the
//! reference defaults of [`ScenarioConfig::default`]. Unknown keys are rejected.
//! Quantities that are naturally logarithmic (noise, power, thresholds, the
//! reference path loss) are stored in dB in the file and converted with the
//! accessor methods.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, ArrayGeometry, SubcarrierGrid};

pub type Point3 = [f64; 3];

/// `dBW → W`.
pub fn dbw_to_watts(dbw: f64) -> f64 {
    10f64.powf(dbw / 10.0)
}

/// `dBm → W`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Power ratio in dB to linear.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Element counts and spacing of one planar array; spacing is in carrier wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySpec {
    pub nx: usize,
    pub ny: usize,
    pub spacing_wavelengths: f64,
}

impl ArraySpec {
    pub const fn square(side: usize, spacing_wavelengths: f64) -> Self {
        Self { nx: side, ny: side, spacing_wavelengths }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArraysConfig {
    /// Holographic surface at the base station.
    pub rhs: ArraySpec,
    pub ris: ArraySpec,
    pub user: ArraySpec,
}

impl Default for ArraysConfig {
    fn default() -> Self {
        Self {
            rhs: ArraySpec::square(5, 1.0 / 6.0),
            ris: ArraySpec::square(10, 0.5),
            user: ArraySpec::square(4, 0.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PositionsConfig {
    pub base_station: Point3,
    pub ris: Point3,
    pub targets: Vec<Point3>,
    pub clutter: Vec<Point3>,
    pub users: Vec<Point3>,
}

impl Default for PositionsConfig {
    fn default() -> Self {
        Self {
            base_station: [0.0, 0.0, 0.0],
            ris: [5.0, 5.0, 5.0],
            targets: vec![[1.0, 2.0, 3.0], [2.0, 1.0, 1.0]],
            clutter: vec![[2.4, 3.4, 3.8], [3.2, 2.8, 2.8], [5.6, 3.8, 2.0]],
            users: vec![[-6.0, 1.5, 3.0], [-5.0, 1.5, 3.0], [1.0, 2.0, 2.5]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BandConfig {
    pub carrier_hz: f64,
    pub spacing_hz: f64,
    pub subcarriers: usize,
}

impl Default for BandConfig {
    fn default() -> Self {
        Self { carrier_hz: 0.15e12, spacing_hz: 0.5e9, subcarriers: 16 }
    }
}

/// Path-loss exponents per link class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExponentsConfig {
    pub bs_ris: f64,
    /// Direct radar link, base station to targets and clutter.
    pub radar_direct: f64,
    pub bs_user: f64,
    /// RIS to targets and clutter.
    pub ris_radar: f64,
    pub ris_user: f64,
}

impl Default for ExponentsConfig {
    fn default() -> Self {
        Self { bs_ris: 2.0, radar_direct: 2.4, bs_user: 2.8, ris_radar: 2.0, ris_user: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub rician_direct: f64,
    pub rician_ris: f64,
    pub nlos_direct: usize,
    pub nlos_ris: usize,
    pub pathloss_ref_db: f64,
    pub ref_distance_m: f64,
    pub exponents: ExponentsConfig,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            rician_direct: 100.0,
            rician_ris: 100.0,
            nlos_direct: 15,
            nlos_ris: 15,
            pathloss_ref_db: -30.0,
            ref_distance_m: 1.0,
            exponents: ExponentsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadarConfig {
    pub target_rcs: f64,
    pub clutter_rcs: f64,
    pub noise_dbm: f64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        Self { target_rcs: 1.0, clutter_rcs: 1.0, noise_dbm: -45.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CommConfig {
    pub noise_dbm: f64,
    /// Per-user sum-average SINR threshold.
    pub eta_db: f64,
}

impl Default for CommConfig {
    fn default() -> Self {
        Self { noise_dbm: -55.0, eta_db: 9.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerConfig {
    pub per_subcarrier_dbw: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self { per_subcarrier_dbw: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RhsConfig {
    pub feeds: usize,
    pub refractive_index: f64,
    /// Feed coordinates in the surface plane (meters). Empty: evenly spaced
    /// along the x edge at `y = 0`.
    pub feed_positions: Vec<[f64; 2]>,
}

impl Default for RhsConfig {
    fn default() -> Self {
        Self { feeds: 4, refractive_index: 3f64.sqrt(), feed_positions: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Dinkelbach stopping threshold on the parametric optimum.
    pub zeta1: f64,
    /// C-ADMM stopping threshold on `‖φ_l − φ_{l-1}‖²`.
    pub zeta2: f64,
    /// Outer-loop threshold on the squared change of the min radar SINR.
    pub zeta3: f64,
    pub rho: f64,
    pub rsd_step: f64,
    pub rsd_max_iter: usize,
    pub cadmm_max_iter: usize,
    pub am_max_iter: usize,
    pub dinkelbach_max_iter: usize,
    /// Outer iterations allowed for restoring the user SINR constraints at start-up.
    pub restoration_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            zeta1: 1e-6,
            zeta2: 1e-6,
            zeta3: 1e-4,
            rho: 1.0,
            rsd_step: 3.98,
            rsd_max_iter: 100,
            cadmm_max_iter: 24,
            am_max_iter: 30,
            dinkelbach_max_iter: 20,
            restoration_max_iter: 30,
        }
    }
}

/// Complete description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub arrays: ArraysConfig,
    pub positions: PositionsConfig,
    pub band: BandConfig,
    pub channel: ChannelConfig,
    pub radar: RadarConfig,
    pub comm: CommConfig,
    pub power: PowerConfig,
    pub rhs: RhsConfig,
    pub solver: SolverConfig,
}

/// Pairwise distances used by the path-loss model.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDistances {
    pub bs_ris: f64,
    pub bs_target: Vec<f64>,
    pub ris_target: Vec<f64>,
    pub bs_clutter: Vec<f64>,
    pub ris_clutter: Vec<f64>,
    pub bs_user: Vec<f64>,
    pub ris_user: Vec<f64>,
}

impl ScenarioConfig {
    /// Parse a TOML document; an empty document yields the defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Reduced problem size used for the convergence and mode-comparison checks:
    /// 4×4 surface, 6×6 RIS, 8 subcarriers, two users, two targets, two clutter patches.
    pub fn desk() -> Self {
        let mut cfg = Self::default();
        cfg.arrays.rhs = ArraySpec::square(4, 1.0 / 6.0);
        cfg.arrays.ris = ArraySpec::square(6, 0.5);
        cfg.band.subcarriers = 8;
        cfg.positions.users.truncate(2);
        cfg.positions.clutter.truncate(2);
        cfg
    }

    /// Sweep baseline: 4×4 surface with the full 10×10 RIS.
    pub fn sweep_baseline() -> Self {
        let mut cfg = Self::default();
        cfg.arrays.rhs = ArraySpec::square(4, 1.0 / 6.0);
        cfg
    }

    /// Resize the user population. Extra users are placed next to the
    /// reference users on a line parallel to the y axis.
    pub fn set_num_users(&mut self, users: usize) {
        let base = PositionsConfig::default().users;
        let mut out: Vec<Point3> = base.iter().take(users).cloned().collect();
        while out.len() < users {
            let extra = (out.len() - base.len()) as f64;
            out.push([-5.5, 2.25 + 0.75 * extra, 3.0]);
        }
        self.positions.users = out;
    }

    pub fn num_targets(&self) -> usize {
        self.positions.targets.len()
    }
    pub fn num_clutter(&self) -> usize {
        self.positions.clutter.len()
    }
    pub fn num_users(&self) -> usize {
        self.positions.users.len()
    }
    pub fn num_subcarriers(&self) -> usize {
        self.band.subcarriers
    }
    pub fn num_feeds(&self) -> usize {
        self.rhs.feeds
    }

    pub fn grid(&self) -> SubcarrierGrid {
        SubcarrierGrid {
            carrier_hz: self.band.carrier_hz,
            spacing_hz: self.band.spacing_hz,
            count: self.band.subcarriers,
        }
    }

    fn geometry(&self, spec: &ArraySpec) -> ArrayGeometry {
        let d = spec.spacing_wavelengths * self.grid().carrier_wavelength();
        ArrayGeometry { n_x: spec.nx, n_y: spec.ny, d_x: d, d_y: d }
    }

    pub fn rhs_geometry(&self) -> ArrayGeometry {
        self.geometry(&self.arrays.rhs)
    }
    pub fn ris_geometry(&self) -> ArrayGeometry {
        self.geometry(&self.arrays.ris)
    }
    pub fn user_geometry(&self) -> ArrayGeometry {
        self.geometry(&self.arrays.user)
    }

    /// Reference path loss `K_0` as a linear power ratio.
    pub fn pathloss_ref(&self) -> f64 {
        db_to_linear(self.channel.pathloss_ref_db)
    }
    pub fn radar_noise_w(&self) -> f64 {
        dbm_to_watts(self.radar.noise_dbm)
    }
    pub fn comm_noise_w(&self) -> f64 {
        dbm_to_watts(self.comm.noise_dbm)
    }
    pub fn power_budget_w(&self) -> f64 {
        dbw_to_watts(self.power.per_subcarrier_dbw)
    }
    /// Linear per-user threshold `η`.
    pub fn eta(&self) -> f64 {
        db_to_linear(self.comm.eta_db)
    }
    /// Threshold applied to the unnormalized ratio `Σ signal / Σ (interference + noise)`, `K·η`.
    pub fn eta_hat(&self) -> f64 {
        self.num_subcarriers() as f64 * self.eta()
    }

    pub fn link_distances(&self) -> LinkDistances {
        let p = &self.positions;
        LinkDistances {
            bs_ris: distance(p.base_station, p.ris),
            bs_target: p.targets.iter().map(|t| distance(p.base_station, *t)).collect(),
            ris_target: p.targets.iter().map(|t| distance(p.ris, *t)).collect(),
            bs_clutter: p.clutter.iter().map(|c| distance(p.base_station, *c)).collect(),
            ris_clutter: p.clutter.iter().map(|c| distance(p.ris, *c)).collect(),
            bs_user: p.users.iter().map(|u| distance(p.base_station, *u)).collect(),
            ris_user: p.users.iter().map(|u| distance(p.ris, *u)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        for (name, spec) in [("rhs", &self.arrays.rhs), ("ris", &self.arrays.ris), ("user", &self.arrays.user)] {
            if spec.nx == 0 || spec.ny == 0 {
                return bad(format!("arrays.{name} needs at least one element per axis"));
            }
            if !(spec.spacing_wavelengths > 0.0) {
                return bad(format!("arrays.{name}.spacing_wavelengths must be positive"));
            }
        }
        if let Err(e) = self.grid().validate() {
            return bad(format!("band: {e}"));
        }
        if self.positions.targets.is_empty() {
            return bad("at least one target is required".into());
        }
        if self.positions.users.is_empty() {
            return bad("at least one user is required".into());
        }
        let d = self.link_distances();
        let all = std::iter::once(d.bs_ris)
            .chain(d.bs_target.iter().cloned())
            .chain(d.ris_target.iter().cloned())
            .chain(d.bs_clutter.iter().cloned())
            .chain(d.ris_clutter.iter().cloned())
            .chain(d.bs_user.iter().cloned())
            .chain(d.ris_user.iter().cloned());
        for r in all {
            if !(r > 0.0) {
                return bad("all link distances must be positive (coincident positions)".into());
            }
        }
        let c = &self.channel;
        if !(c.rician_direct >= 0.0 && c.rician_ris >= 0.0) {
            return bad("Rician factors must be nonnegative".into());
        }
        let k0 = self.pathloss_ref();
        if !(k0 > 0.0 && k0 <= 1.0) {
            return bad(format!("reference path loss must lie in (0, 1], got {k0}"));
        }
        if !(c.ref_distance_m > 0.0) {
            return bad("reference distance must be positive".into());
        }
        let e = &c.exponents;
        for (name, v) in [
            ("bs_ris", e.bs_ris),
            ("radar_direct", e.radar_direct),
            ("bs_user", e.bs_user),
            ("ris_radar", e.ris_radar),
            ("ris_user", e.ris_user),
        ] {
            if !(2.0..=4.0).contains(&v) {
                return bad(format!("path-loss exponent {name} = {v} outside [2, 4]"));
            }
        }
        if !(self.radar.target_rcs.is_finite() && self.radar.clutter_rcs.is_finite()) {
            return bad("radar cross sections must be finite".into());
        }
        if !(self.radar.noise_dbm.is_finite() && self.comm.noise_dbm.is_finite()) {
            return bad("noise powers must be finite".into());
        }
        if !self.power.per_subcarrier_dbw.is_finite() {
            return bad("power budget must be finite".into());
        }
        if !self.comm.eta_db.is_finite() {
            return bad("eta_db must be finite".into());
        }
        if self.rhs.feeds == 0 {
            return bad("at least one feed is required".into());
        }
        if self.rhs.feeds < self.num_users() {
            return bad(format!(
                "{} feeds cannot carry {} user streams",
                self.rhs.feeds,
                self.num_users()
            ));
        }
        if !(self.rhs.refractive_index >= 1.0) {
            return bad("refractive index must be at least 1".into());
        }
        if !self.rhs.feed_positions.is_empty() && self.rhs.feed_positions.len() != self.rhs.feeds {
            return bad("feed_positions must list one coordinate per feed".into());
        }
        let s = &self.solver;
        if !(s.zeta1 > 0.0 && s.zeta2 > 0.0 && s.zeta3 > 0.0) {
            return bad("solver thresholds must be positive".into());
        }
        if !(s.rho > 0.0 && s.rsd_step > 0.0) {
            return bad("rho and rsd_step must be positive".into());
        }
        if s.am_max_iter == 0 || s.dinkelbach_max_iter == 0 || s.cadmm_max_iter == 0 || s.rsd_max_iter == 0 {
            return bad("iteration caps must be positive".into());
        }
        Ok(())
    }
}
