use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::presets::{energy_preset, fov_preset, DEFAULT_ENERGY, DEFAULT_FOV, PRESET_DIR_ENV};
use crate::geometry::{
    discretize_area_with, CandidateSpec, FovPattern, Grid, GridLayout, Rect, Ring, WeightRegion, WeightSpec,
};
use crate::lifetime::MoteEnergyParams;
use crate::relay::{ChannelParams, Interferer, LinkLimits, PlannerMode};
use crate::sim::OccupantModel;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{field}: {message}")]
    Semantic { field: String, message: String },
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
}

fn semantic(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Semantic { field: field.to_string(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeskRegion {
    pub x0_m: f64,
    pub y0_m: f64,
    pub x1_m: f64,
    pub y1_m: f64,
    #[serde(default = "default_desk_weight")]
    pub weight: f64,
}

fn default_desk_weight() -> f64 {
    3.0
}

impl DeskRegion {
    pub fn rect(&self) -> Rect {
        Rect::new(self.x0_m, self.y0_m, self.x1_m, self.y1_m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfficeSection {
    pub width_m: f64,
    pub depth_m: f64,
    pub step_m: f64,
    #[serde(default)]
    pub layout: GridLayout,
    #[serde(default = "one")]
    pub base_weight: f64,
    #[serde(default)]
    pub desks: Vec<DeskRegion>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FovSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mount_height_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane_height_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_range_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rings: Option<Vec<Ring>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSection {
    #[serde(default = "yes")]
    pub exclude_border: bool,
    #[serde(default = "default_yaw_step")]
    pub yaw_step_deg: u32,
    #[serde(default = "yes")]
    pub reduce_symmetry: bool,
}

fn yes() -> bool {
    true
}

fn default_yaw_step() -> u32 {
    15
}

impl Default for CandidateSection {
    fn default() -> Self {
        CandidateSection { exclude_border: true, yaw_step_deg: 15, reduce_symmetry: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementSection {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_budget")]
    pub time_budget_s: f64,
}

fn default_k() -> usize {
    3
}

fn default_budget() -> f64 {
    60.0
}

impl Default for PlacementSection {
    fn default() -> Self {
        PlacementSection { k: default_k(), time_budget_s: default_budget() }
    }
}

/// Energy inputs: an optional preset with per-field overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EnergySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub battery_capacity_mah: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub voltage_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current_sleep_ma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current_rx_ma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current_tx_ma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current_pir_ma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cca_duration_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_rate_per_day: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload_tx_time_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupied_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfererEntry {
    pub x_m: f64,
    pub y_m: f64,
    pub power_dbm: f64,
    pub activity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaySection {
    pub sink_m: [f64; 2],
    pub sensors_m: Vec<[f64; 2]>,
    #[serde(default)]
    pub candidates_m: Vec<[f64; 2]>,
    #[serde(default = "d_tx")]
    pub tx_power_dbm: f64,
    #[serde(default = "d_noise")]
    pub noise_power_dbm: f64,
    #[serde(default = "d_ple")]
    pub path_loss_exponent: f64,
    #[serde(default = "d_ref")]
    pub reference_loss_db: f64,
    #[serde(default = "d_sinr")]
    pub sinr_threshold_db: f64,
    #[serde(default)]
    pub interferers: Vec<InterfererEntry>,
    #[serde(default = "d_maxd")]
    pub max_link_distance_m: f64,
    #[serde(default = "d_cap")]
    pub outage_cap: f64,
    #[serde(default = "d_ppd")]
    pub packets_per_day: f64,
    #[serde(default)]
    pub mode: PlannerMode,
}

fn d_tx() -> f64 {
    ChannelParams::default().tx_power_dbm
}
fn d_noise() -> f64 {
    ChannelParams::default().noise_power_dbm
}
fn d_ple() -> f64 {
    ChannelParams::default().path_loss_exponent
}
fn d_ref() -> f64 {
    ChannelParams::default().reference_loss_db
}
fn d_sinr() -> f64 {
    ChannelParams::default().sinr_threshold_db
}
fn d_maxd() -> f64 {
    LinkLimits::default().max_link_distance_m
}
fn d_cap() -> f64 {
    LinkLimits::default().outage_cap
}
fn d_ppd() -> f64 {
    400.0
}

impl RelaySection {
    pub fn channel(&self) -> ChannelParams {
        ChannelParams {
            tx_power_dbm: self.tx_power_dbm,
            noise_power_dbm: self.noise_power_dbm,
            path_loss_exponent: self.path_loss_exponent,
            reference_loss_db: self.reference_loss_db,
            sinr_threshold_db: self.sinr_threshold_db,
            interferers: self
                .interferers
                .iter()
                .map(|i| Interferer { x: i.x_m, y: i.y_m, power_dbm: i.power_dbm, activity: i.activity })
                .collect(),
        }
    }

    pub fn limits(&self) -> LinkLimits {
        LinkLimits { max_link_distance_m: self.max_link_distance_m, outage_cap: self.outage_cap }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OccupantSection {
    #[serde(default = "d_occ")]
    pub mean_occupied_s: f64,
    #[serde(default = "d_vac")]
    pub mean_vacant_s: f64,
    #[serde(default = "d_rate")]
    pub motion_rate_per_min: f64,
    #[serde(default = "d_hand")]
    pub hand_fraction: f64,
    #[serde(default = "d_arm")]
    pub arm_fraction: f64,
    #[serde(default)]
    pub door_x_m: f64,
    #[serde(default)]
    pub door_y_m: f64,
    #[serde(default = "d_dur")]
    pub trace_duration_s: f64,
    #[serde(default = "d_count")]
    pub trace_count: usize,
    #[serde(default = "d_timeouts")]
    pub timeouts_s: Vec<f64>,
    #[serde(default = "d_ta")]
    pub ta_target: f64,
    #[serde(default = "d_comfort")]
    pub comfort_target: f64,
}

fn d_occ() -> f64 {
    2700.0
}
fn d_vac() -> f64 {
    1200.0
}
fn d_rate() -> f64 {
    6.0
}
fn d_hand() -> f64 {
    0.7
}
fn d_arm() -> f64 {
    0.2
}
fn d_dur() -> f64 {
    86_400.0
}
fn d_count() -> usize {
    50
}
/// One-second timeout grid up to ten minutes.
pub fn d_timeouts() -> Vec<f64> {
    (1..=600).map(f64::from).collect()
}
fn d_ta() -> f64 {
    0.9
}
fn d_comfort() -> f64 {
    0.95
}

impl Default for OccupantSection {
    fn default() -> Self {
        OccupantSection {
            mean_occupied_s: d_occ(),
            mean_vacant_s: d_vac(),
            motion_rate_per_min: d_rate(),
            hand_fraction: d_hand(),
            arm_fraction: d_arm(),
            door_x_m: 0.0,
            door_y_m: 0.0,
            trace_duration_s: d_dur(),
            trace_count: d_count(),
            timeouts_s: d_timeouts(),
            ta_target: d_ta(),
            comfort_target: d_comfort(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SeedSection {
    /// Trace i uses seed base + i.
    #[serde(default)]
    pub base: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "d_dir")]
    pub dir: String,
}

fn d_dir() -> String {
    "out".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: d_dir() }
    }
}

/// A validated scenario. After parsing, presets are expanded in place so the
/// struct serializes back to a self-contained file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub office: OfficeSection,
    #[serde(default)]
    pub fov: FovSection,
    #[serde(default)]
    pub candidates: CandidateSection,
    #[serde(default)]
    pub placement: PlacementSection,
    #[serde(default)]
    pub energy: EnergySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relay: Option<RelaySection>,
    #[serde(default)]
    pub occupants: OccupantSection,
    #[serde(default)]
    pub seeds: SeedSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Where to look for preset files beyond the built-in ones.
pub fn preset_dir(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| std::env::var_os(PRESET_DIR_ENV).map(PathBuf::from))
}

fn load_preset_file<T: for<'de> Deserialize<'de>>(
    dir: Option<&Path>,
    kind: &str,
    name: &str,
) -> Result<Option<T>, ScenarioError> {
    let Some(dir) = dir else { return Ok(None) };
    let path = dir.join(kind).join(format!("{name}.toml"));
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path)
        .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
    toml::from_str(&text).map(Some).map_err(|e| semantic(&format!("{kind}.preset"), format!("{}: {e}", path.display())))
}

fn resolve_fov(section: &FovSection, dir: Option<&Path>) -> Result<FovSection, ScenarioError> {
    let name = section.preset.clone().unwrap_or_else(|| DEFAULT_FOV.to_string());
    let base: FovPattern = match load_preset_file::<FovPattern>(dir, "fov", &name)? {
        Some(p) => p,
        None => fov_preset(&name).ok_or_else(|| semantic("fov.preset", format!("unknown preset '{name}'")))?,
    };
    Ok(FovSection {
        preset: None,
        mount_height_m: Some(section.mount_height_m.unwrap_or(base.mount_height_m)),
        plane_height_m: Some(section.plane_height_m.unwrap_or(base.plane_height_m)),
        max_range_m: Some(section.max_range_m.unwrap_or(base.max_range_m)),
        rings: Some(section.rings.clone().unwrap_or(base.rings)),
    })
}

fn resolve_energy(section: &EnergySection, dir: Option<&Path>) -> Result<EnergySection, ScenarioError> {
    let name = section.preset.clone().unwrap_or_else(|| DEFAULT_ENERGY.to_string());
    let b: MoteEnergyParams = match load_preset_file::<MoteEnergyParams>(dir, "energy", &name)? {
        Some(p) => p,
        None => energy_preset(&name).ok_or_else(|| semantic("energy.preset", format!("unknown preset '{name}'")))?,
    };
    let s = section;
    Ok(EnergySection {
        preset: None,
        battery_capacity_mah: Some(s.battery_capacity_mah.unwrap_or(b.battery_capacity_mah)),
        voltage_v: Some(s.voltage_v.unwrap_or(b.voltage_v)),
        current_sleep_ma: Some(s.current_sleep_ma.unwrap_or(b.current_sleep_ma)),
        current_rx_ma: Some(s.current_rx_ma.unwrap_or(b.current_rx_ma)),
        current_tx_ma: Some(s.current_tx_ma.unwrap_or(b.current_tx_ma)),
        current_pir_ma: Some(s.current_pir_ma.unwrap_or(b.current_pir_ma)),
        cca_duration_s: Some(s.cca_duration_s.unwrap_or(b.cca_duration_s)),
        event_rate_per_day: Some(s.event_rate_per_day.unwrap_or(b.event_rate_per_day)),
        payload_tx_time_s: Some(s.payload_tx_time_s.unwrap_or(b.payload_tx_time_s)),
        occupied_fraction: Some(s.occupied_fraction.unwrap_or(b.occupied_fraction)),
        t_min_s: Some(s.t_min_s.unwrap_or(b.t_min_s)),
        t_max_s: Some(s.t_max_s.unwrap_or(b.t_max_s)),
        alphas: Some(s.alphas.clone().unwrap_or_else(|| vec![1.0, 2.0, 3.0, 4.0, 5.0])),
    })
}

impl Scenario {
    /// Parses and validates scenario text.
    pub fn from_toml(text: &str, preset_dir: Option<&Path>) -> Result<Self, ScenarioError> {
        let probe: toml::Value = toml::from_str(text).map_err(|e| parse_error(text, &e))?;
        match probe.get("schema_version").and_then(toml::Value::as_integer) {
            Some(v) if v == SCHEMA_VERSION as i64 => {}
            Some(v) => return Err(ScenarioError::Version(v.max(0) as u32)),
            None => return Err(semantic("schema_version", "missing or not an integer")),
        }
        let mut s: Scenario = toml::from_str(text).map_err(|e| parse_error(text, &e))?;
        s.fov = resolve_fov(&s.fov, preset_dir)?;
        s.energy = resolve_energy(&s.energy, preset_dir)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let o = &self.office;
        for (f, v) in [("office.width_m", o.width_m), ("office.depth_m", o.depth_m), ("office.step_m", o.step_m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(semantic(f, format!("must be positive, got {v}")));
            }
        }
        self.grid().map_err(|e| semantic("office", e.to_string()))?;
        self.pattern().validate().map_err(|e| semantic("fov", e.to_string()))?;
        let c = &self.candidates;
        if c.yaw_step_deg == 0 || 360 % c.yaw_step_deg != 0 {
            return Err(semantic("candidates.yaw_step_deg", "must divide 360"));
        }
        if self.placement.k == 0 {
            return Err(semantic("placement.k", "must be at least 1"));
        }
        if !(self.placement.time_budget_s > 0.0) {
            return Err(semantic("placement.time_budget_s", "must be positive"));
        }
        self.energy().validate().map_err(|e| semantic("energy", e.to_string()))?;
        if let Some(a) = self.energy.alphas.as_ref().and_then(|a| a.iter().find(|&&a| !(a >= 1.0))) {
            return Err(semantic("energy.alphas", format!("every alpha must be at least 1, got {a}")));
        }
        if let Some(r) = &self.relay {
            r.channel().validate().map_err(|e| semantic("relay", e.to_string()))?;
            if r.sensors_m.is_empty() {
                return Err(semantic("relay.sensors_m", "at least one sensor is required"));
            }
            if !(r.max_link_distance_m > 0.0) {
                return Err(semantic("relay.max_link_distance_m", "must be positive"));
            }
            if !(0.0..1.0).contains(&r.outage_cap) {
                return Err(semantic("relay.outage_cap", "must lie in [0, 1)"));
            }
            if !(r.packets_per_day >= 0.0) {
                return Err(semantic("relay.packets_per_day", "must be nonnegative"));
            }
        }
        let occ = &self.occupants;
        if self.office.desks.is_empty() {
            return Err(semantic("office.desks", "at least one desk is required for the occupant model"));
        }
        self.occupant_model().validate().map_err(|e| semantic("occupants", e.to_string()))?;
        if !(occ.trace_duration_s > 0.0) {
            return Err(semantic("occupants.trace_duration_s", "must be positive"));
        }
        if occ.trace_count == 0 {
            return Err(semantic("occupants.trace_count", "must be at least 1"));
        }
        if occ.timeouts_s.is_empty() || occ.timeouts_s.iter().any(|&t| !(t > 0.0)) {
            return Err(semantic("occupants.timeouts_s", "needs positive timeouts"));
        }
        if occ.timeouts_s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(semantic("occupants.timeouts_s", "must be strictly increasing"));
        }
        if !(occ.ta_target > 0.0 && occ.ta_target <= 1.0) {
            return Err(semantic("occupants.ta_target", "must lie in (0, 1]"));
        }
        if !(occ.comfort_target > 0.0 && occ.comfort_target <= 1.0) {
            return Err(semantic("occupants.comfort_target", "must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn grid(&self) -> crate::Result<Grid> {
        let o = &self.office;
        let spec = WeightSpec::Regions {
            base: o.base_weight,
            regions: o.desks.iter().map(|d| WeightRegion { rect: d.rect(), weight: d.weight }).collect(),
        };
        discretize_area_with(o.width_m, o.depth_m, o.step_m, o.layout, &spec)
    }

    /// The first desk, used as the occupant's work area.
    pub fn desk(&self) -> Rect {
        self.office.desks[0].rect()
    }

    pub fn pattern(&self) -> FovPattern {
        let f = &self.fov;
        FovPattern {
            mount_height_m: f.mount_height_m.unwrap_or_default(),
            plane_height_m: f.plane_height_m.unwrap_or_default(),
            max_range_m: f.max_range_m.unwrap_or_default(),
            rings: f.rings.clone().unwrap_or_default(),
        }
    }

    pub fn candidate_spec(&self) -> CandidateSpec {
        let c = &self.candidates;
        CandidateSpec {
            exclude_border: c.exclude_border,
            yaw_step_deg: c.yaw_step_deg,
            reduce_symmetry: c.reduce_symmetry,
        }
    }

    pub fn energy(&self) -> MoteEnergyParams {
        let e = &self.energy;
        let d = MoteEnergyParams::default();
        MoteEnergyParams {
            battery_capacity_mah: e.battery_capacity_mah.unwrap_or(d.battery_capacity_mah),
            voltage_v: e.voltage_v.unwrap_or(d.voltage_v),
            current_sleep_ma: e.current_sleep_ma.unwrap_or(d.current_sleep_ma),
            current_rx_ma: e.current_rx_ma.unwrap_or(d.current_rx_ma),
            current_tx_ma: e.current_tx_ma.unwrap_or(d.current_tx_ma),
            current_pir_ma: e.current_pir_ma.unwrap_or(d.current_pir_ma),
            cca_duration_s: e.cca_duration_s.unwrap_or(d.cca_duration_s),
            event_rate_per_day: e.event_rate_per_day.unwrap_or(d.event_rate_per_day),
            payload_tx_time_s: e.payload_tx_time_s.unwrap_or(d.payload_tx_time_s),
            occupied_fraction: e.occupied_fraction.unwrap_or(d.occupied_fraction),
            t_min_s: e.t_min_s.unwrap_or(d.t_min_s),
            t_max_s: e.t_max_s.unwrap_or(d.t_max_s),
        }
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.energy.alphas.clone().unwrap_or_else(|| vec![1.0, 2.0, 3.0, 4.0, 5.0])
    }

    pub fn occupant_model(&self) -> OccupantModel {
        let o = &self.occupants;
        OccupantModel {
            mean_occupied_s: o.mean_occupied_s,
            mean_vacant_s: o.mean_vacant_s,
            motion_rate_per_min: o.motion_rate_per_min,
            hand_fraction: o.hand_fraction,
            arm_fraction: o.arm_fraction,
            desk: self.office.desks.first().map(DeskRegion::rect).unwrap_or(Rect::new(0.0, 0.0, 0.0, 0.0)),
            width_m: self.office.width_m,
            depth_m: self.office.depth_m,
            door: (o.door_x_m, o.door_y_m),
        }
    }

    pub fn trace_seeds(&self) -> Vec<u64> {
        (0..self.occupants.trace_count as u64).map(|i| self.seeds.base + i).collect()
    }
}

fn parse_error(text: &str, e: &toml::de::Error) -> ScenarioError {
    let (line, column) = match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            (line, column)
        }
        None => (0, 0),
    };
    ScenarioError::Parse { line, column, message: e.message().to_string() }
}

/// Reads, hashes and validates a scenario file.
pub fn parse_scenario(path: &Path, preset_dir: Option<&Path>) -> Result<(Scenario, String), ScenarioError> {
    let bytes = std::fs::read(path)
        .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| ScenarioError::Parse { line: 0, column: 0, message: "file is not valid UTF-8".into() })?;
    let s = Scenario::from_toml(&text, preset_dir)?;
    Ok((s, super::format::sha256_hex(&bytes)))
}
