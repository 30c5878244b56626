use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::environment::{BuildingParams, ScenarioConfig};
use crate::error::{Error, Result};
use crate::neuralnet::TrainConfig;
use crate::policies::PolicyKind;
use crate::radio::{db_to_linear, AntennaConfig, ChannelParams};
use crate::{Antenna, Channel};

/// Link-level constants in the units they are usually quoted in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub tx_power_w: f64,
    pub near_field_db: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub fading_m_los: f64,
    pub fading_m_nlos: f64,
    pub noise_w: f64,
    pub sinr_threshold_db: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            tx_power_w: 40.0,
            near_field_db: -38.4,
            alpha_los: 2.1,
            alpha_nlos: 4.0,
            fading_m_los: 1.0,
            fading_m_nlos: 1.0,
            noise_w: 8e-13,
            sinr_threshold_db: 0.0,
        }
    }
}

/// Simulation disk radius: `max(min_radius_m, radius holding min_expected_bs
/// base stations on average)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowRule {
    pub min_radius_m: f64,
    pub min_expected_bs: f64,
}

impl Default for WindowRule {
    fn default() -> Self {
        Self { min_radius_m: 2000.0, min_expected_bs: 100.0 }
    }
}

impl WindowRule {
    pub fn radius_m(&self, bs_density_per_km2: f64) -> f64 {
        let km = (self.min_expected_bs / (std::f64::consts::PI * bs_density_per_km2)).sqrt();
        self.min_radius_m.max(1000.0 * km)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrids {
    pub heights_m: Vec<f64>,
    pub densities_per_km2: Vec<f64>,
    pub beamwidths_deg: Vec<f64>,
}

impl Default for SweepGrids {
    fn default() -> Self {
        Self {
            heights_m: (1..=10).map(|k| 30.0 * k as f64).collect(),
            densities_per_km2: vec![1.0, 2.0, 5.0, 10.0, 20.0],
            beamwidths_deg: vec![30.0, 45.0, 60.0, 90.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSize {
    pub train_samples: usize,
    pub test_samples: usize,
    /// UAV heights of training scenarios are uniform on this range.
    pub height_min_m: f64,
    pub height_max_m: f64,
}

impl Default for DatasetSize {
    fn default() -> Self {
        Self { train_samples: 50_000, test_samples: 10_000, height_min_m: 30.0, height_max_m: 300.0 }
    }
}

/// Everything an experiment depends on. Serialized as TOML; angles carry a
/// `_deg` suffix, densities are per km^2, lengths in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub n_trials: usize,
    pub zeta: usize,
    pub xi: usize,
    pub bs_density_per_km2: f64,
    pub bs_height_m: f64,
    pub n_elements: u32,
    pub beamwidth_deg: f64,
    pub uav_height_m: f64,
    pub policies: Vec<PolicyKind>,
    pub histogram_heights_m: Vec<f64>,
    pub channel: ChannelConfig,
    pub buildings: BuildingParams,
    pub window: WindowRule,
    pub sweep: SweepGrids,
    pub dataset: DatasetSize,
    pub training: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: 2020,
            n_trials: 10_000,
            zeta: 10,
            xi: 20,
            bs_density_per_km2: 5.0,
            bs_height_m: 30.0,
            n_elements: 8,
            beamwidth_deg: 45.0,
            uav_height_m: 100.0,
            policies: PolicyKind::ALL.to_vec(),
            histogram_heights_m: vec![60.0, 100.0, 140.0],
            channel: ChannelConfig::default(),
            buildings: BuildingParams { density_per_km2: 300.0, coverage_ratio: 0.5, height_scale_m: 20.0 },
            window: WindowRule::default(),
            sweep: SweepGrids::default(),
            dataset: DatasetSize::default(),
            training: TrainConfig::default(),
        }
    }
}

/// One coordinate of a sweep: where the UAV flies and what network it sees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub uav_height_m: f64,
    pub bs_density_per_km2: f64,
    pub beamwidth_deg: f64,
}

impl SweepPoint {
    pub fn beamwidth_rad(&self) -> f64 {
        self.beamwidth_deg.to_radians()
    }
}

impl std::fmt::Display for SweepPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "lambda={}/km2 omega={}deg", self.bs_density_per_km2, self.beamwidth_deg)
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads TOML, or JSON when the extension is `.json`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_trials == 0 {
            return bad("n_trials must be >= 1".into());
        }
        if self.zeta == 0 {
            return bad("zeta must be >= 1".into());
        }
        let g = &self.sweep;
        if g.heights_m.is_empty() || g.densities_per_km2.is_empty() || g.beamwidths_deg.is_empty() {
            return bad("sweep grids must be non-empty".into());
        }
        if self.policies.is_empty() {
            return bad("policy list is empty".into());
        }
        for &d in g.densities_per_km2.iter().chain([&self.bs_density_per_km2]) {
            if !(d > 0.0 && d.is_finite()) {
                return bad(format!("BS density {d} must be positive"));
            }
        }
        for &h in g.heights_m.iter().chain(&self.histogram_heights_m).chain([&self.uav_height_m]) {
            if !(h > 0.0 && h.is_finite()) {
                return bad(format!("UAV height {h} must be positive"));
            }
        }
        for &w in g.beamwidths_deg.iter().chain([&self.beamwidth_deg]) {
            AntennaConfig::new(w.to_radians(), self.n_elements)?;
        }
        if !(self.bs_height_m > 0.0) {
            return bad("bs_height_m must be positive".into());
        }
        let d = &self.dataset;
        if !(d.height_min_m > 0.0 && d.height_min_m <= d.height_max_m) {
            return bad("dataset height range is empty".into());
        }
        if !(self.window.min_radius_m >= 0.0 && self.window.min_expected_bs > 0.0) {
            return bad("window rule must be non-negative".into());
        }
        crate::environment::BuildingField::from_params(
            self.buildings.density_per_km2,
            self.buildings.coverage_ratio,
            self.buildings.height_scale_m,
            0,
        )?;
        self.channel().validate()?;
        self.training.validate()
    }

    pub fn channel(&self) -> Channel {
        let c = &self.channel;
        ChannelParams {
            tx_power: c.tx_power_w,
            alpha_los: c.alpha_los,
            alpha_nlos: c.alpha_nlos,
            fading_m_los: c.fading_m_los,
            fading_m_nlos: c.fading_m_nlos,
            near_field: db_to_linear(c.near_field_db),
            noise: c.noise_w,
            threshold: db_to_linear(c.sinr_threshold_db),
        }
    }

    pub fn antenna(&self, point: &SweepPoint) -> Result<Antenna> {
        AntennaConfig::new(point.beamwidth_rad(), self.n_elements)
    }

    pub fn default_point(&self) -> SweepPoint {
        SweepPoint {
            uav_height_m: self.uav_height_m,
            bs_density_per_km2: self.bs_density_per_km2,
            beamwidth_deg: self.beamwidth_deg,
        }
    }

    pub fn scenario_config(&self, point: &SweepPoint, uav_height_m: f64) -> ScenarioConfig {
        ScenarioConfig {
            bs_density_per_km2: point.bs_density_per_km2,
            bs_height_m: self.bs_height_m,
            uav_height_m,
            window_radius_m: self.window.radius_m(point.bs_density_per_km2),
            buildings: self.buildings,
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// `# ...` line carried at the top of every output file.
    pub fn header_comment(&self, extra: &str) -> String {
        let mut s = format!("# fingerprint={} master_seed={}", self.fingerprint(), self.master_seed);
        if !extra.is_empty() {
            s.push(' ');
            s.push_str(extra);
        }
        s
    }
}
