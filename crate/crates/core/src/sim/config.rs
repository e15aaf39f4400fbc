//! Scenario configuration: TOML schema, defaults and overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{DMatrix, Vector3};
use serde::Deserialize;

use crate::control::{LqrWeights, OuterLoopGains};
use crate::dynamics::plant::matrix;
use crate::dynamics::{BowWave, PlantModel, StateLayout, TurbulenceLevel};
use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControllerKind {
    Ibvs,
    Pbvs,
}

impl FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ibvs" => Ok(Self::Ibvs),
            "pbvs" => Ok(Self::Pbvs),
            other => Err(format!(
                "unknown controller `{other}` (expected ibvs or pbvs)"
            )),
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ibvs => "ibvs",
            Self::Pbvs => "pbvs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GainTable {
    Table1,
    Table2,
}

impl GainTable {
    pub fn gains(self) -> OuterLoopGains<f64> {
        match self {
            Self::Table1 => OuterLoopGains::table1(),
            Self::Table2 => OuterLoopGains::table2(),
        }
    }
}

impl FromStr for GainTable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table1" | "1" => Ok(Self::Table1),
            "table2" | "2" => Ok(Self::Table2),
            other => Err(format!(
                "unknown gain table `{other}` (expected table1 or table2)"
            )),
        }
    }
}

impl fmt::Display for GainTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Table1 => "table1",
            Self::Table2 => "table2",
        })
    }
}

pub fn parse_turbulence(s: &str) -> Result<TurbulenceLevel, String> {
    match s.to_ascii_lowercase().as_str() {
        "off" | "0" | "none" => Ok(TurbulenceLevel::Off),
        "1" | "i" => Ok(TurbulenceLevel::LevelI),
        "2" | "ii" => Ok(TurbulenceLevel::LevelII),
        other => Err(format!(
            "unknown turbulence level `{other}` (expected off, 1 or 2)"
        )),
    }
}

pub fn turbulence_label(level: TurbulenceLevel) -> &'static str {
    match level {
        TurbulenceLevel::Off => "off",
        TurbulenceLevel::LevelI => "1",
        TurbulenceLevel::LevelII => "2",
    }
}

/// A fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub plant: PlantModel<f64>,
    /// Where the plant came from, for provenance lines.
    pub plant_source: String,
    pub controller: ControllerKind,
    pub gains: OuterLoopGains<f64>,
    /// `table1`, `table2` or `custom`.
    pub gains_label: String,
    pub weights: LqrWeights<f64>,
    pub turbulence: TurbulenceLevel,
    pub seed: u64,
    pub bow_wave: Option<BowWave<f64>>,
    pub drogue_gust_gain: f64,
    pub drogue_restoring_rate: f64,
    /// Error of the believed camera offset, receiver axes [m].
    pub pose_error: Vector3<f64>,
    /// Drogue minus camera at t = 0, tanker axes [m].
    pub initial_relative_position: Vector3<f64>,
    pub capture_radius: f64,
    pub max_duration: f64,
    pub dt: f64,
    /// Depth floor used by the position-based law [m].
    pub pbvs_min_depth: f64,
    pub fov_half_angle_deg: f64,
    /// How long the last command is held after the drogue leaves the image [s].
    pub visual_loss_hold: f64,
    /// Closing-speed bound for the image-error decay check, if any [m/s].
    pub closing_speed_bound: Option<f64>,
    /// Overrides applied after parsing, in order.
    pub overrides: Vec<String>,
}

impl ScenarioConfig {
    /// Built-in plant, Table 1 gains, image-based control, calm air.
    pub fn nominal() -> Self {
        let plant = PlantModel::default_transport();
        let weights = LqrWeights::default_for(&plant);
        Self {
            name: "nominal".into(),
            plant,
            plant_source: "<built-in>".into(),
            controller: ControllerKind::Ibvs,
            gains: OuterLoopGains::table1(),
            gains_label: "table1".into(),
            weights,
            turbulence: TurbulenceLevel::Off,
            seed: 1,
            bow_wave: None,
            drogue_gust_gain: 0.3,
            drogue_restoring_rate: 0.5,
            pose_error: Vector3::zeros(),
            initial_relative_position: Vector3::new(20.0, 2.0, 1.0),
            capture_radius: 0.15,
            max_duration: 60.0,
            dt: 0.01,
            pbvs_min_depth: 0.5,
            fov_half_angle_deg: 60.0,
            visual_loss_hold: 0.5,
            closing_speed_bound: None,
            overrides: Vec::new(),
        }
    }

    /// Full check for a scenario run.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.plant.layout != StateLayout::Standard {
            return Err(ConfigError::field(
                "plant",
                "scenario runs need the standard state layout (no explicit c matrices)",
            ));
        }
        self.validate_fields()
    }

    /// Checks every field but accepts custom-layout plants, which are good
    /// for gain synthesis only.
    pub fn validate_fields(&self) -> Result<(), ConfigError> {
        self.plant.validate()?;
        self.gains.validate()?;
        self.weights.validate(&self.plant)?;
        let positive = [
            ("capture_radius", self.capture_radius),
            ("dt", self.dt),
            ("pbvs_min_depth", self.pbvs_min_depth),
            ("fov_half_angle_deg", self.fov_half_angle_deg),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::field(name, "must be positive"));
            }
        }
        if !(self.fov_half_angle_deg < 90.0) {
            return Err(ConfigError::field("fov_half_angle_deg", "must be below 90"));
        }
        if !(self.max_duration >= 10.0 * self.dt) || !self.max_duration.is_finite() {
            return Err(ConfigError::field(
                "max_duration",
                "must be at least 10 * dt",
            ));
        }
        if !(self.visual_loss_hold >= 0.0) {
            return Err(ConfigError::field("visual_loss_hold", "must be >= 0"));
        }
        for (name, v) in [
            ("drogue.gust_gain", self.drogue_gust_gain),
            ("drogue.restoring_rate", self.drogue_restoring_rate),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ConfigError::field(name, "must be >= 0"));
            }
        }
        if let Some(bw) = &self.bow_wave {
            if !(bw.activation_radius > 0.0) || !(bw.strength >= 0.0) || !(bw.decay_exponent > 0.0)
            {
                return Err(ConfigError::field(
                    "bow_wave",
                    "activation_radius and decay_exponent must be positive, strength >= 0",
                ));
            }
            if !(bw.on_axis_direction.norm() > 0.0) {
                return Err(ConfigError::field(
                    "bow_wave.on_axis_direction",
                    "must be nonzero",
                ));
            }
        }
        if !(self.initial_relative_position.x > 0.0) {
            return Err(ConfigError::field(
                "initial_relative_position",
                "drogue must start ahead of the camera (x > 0)",
            ));
        }
        let finite = |v: &Vector3<f64>| v.iter().all(|c| c.is_finite());
        if !finite(&self.initial_relative_position) {
            return Err(ConfigError::field(
                "initial_relative_position",
                "must be finite",
            ));
        }
        if !finite(&self.pose_error) {
            return Err(ConfigError::field("camera.pose_error", "must be finite"));
        }
        if let Some(b) = self.closing_speed_bound {
            if !(b >= 0.0) {
                return Err(ConfigError::field("closing_speed_bound", "must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, &path.display().to_string(), &base)
    }

    /// Parses a scenario. A relative `plant` path resolves against `base_dir`.
    pub fn from_toml_str(text: &str, origin: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let raw: ScenarioFile = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        let cfg = raw.resolve(base_dir)?;
        cfg.validate_fields()?;
        Ok(cfg)
    }

    pub fn set_controller(&mut self, controller: ControllerKind) {
        self.controller = controller;
        self.overrides.push(format!("controller={controller}"));
    }

    pub fn set_gain_table(&mut self, table: GainTable) {
        self.gains = table.gains();
        self.gains_label = table.to_string();
        self.overrides.push(format!("gains={table}"));
    }

    pub fn set_turbulence(&mut self, level: TurbulenceLevel) {
        self.turbulence = level;
        self.overrides
            .push(format!("turbulence={}", turbulence_label(level)));
    }

    /// Enables the bow wave, keeping configured parameters if present.
    pub fn enable_bow_wave(&mut self) {
        if self.bow_wave.is_none() {
            self.bow_wave = Some(BowWave::default());
        }
        self.overrides.push("bow_wave=on".into());
    }

    pub fn set_pose_error(&mut self, dp: Vector3<f64>) {
        self.pose_error = dp;
        self.overrides
            .push(format!("pose_error={},{},{}", dp.x, dp.y, dp.z));
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    /// Key-value provenance lines for log headers.
    pub fn provenance(&self) -> Vec<(String, String)> {
        let v3 = |v: &Vector3<f64>| format!("{},{},{}", v.x, v.y, v.z);
        let g = &self.gains;
        let mut out = vec![
            ("name".to_string(), self.name.clone()),
            ("plant".to_string(), self.plant_source.clone()),
            ("controller".to_string(), self.controller.to_string()),
            (
                "gains".to_string(),
                format!(
                    "{} k1={} k2={} k3={} k4={} k5={} a={}",
                    self.gains_label, g.k1, g.k2, g.k3, g.k4, g.k5, g.a
                ),
            ),
            (
                "turbulence".to_string(),
                turbulence_label(self.turbulence).to_string(),
            ),
            ("seed".to_string(), self.seed.to_string()),
            (
                "bow_wave".to_string(),
                if self.bow_wave.is_some() { "on" } else { "off" }.to_string(),
            ),
            ("pose_error".to_string(), v3(&self.pose_error)),
            (
                "initial_relative_position".to_string(),
                v3(&self.initial_relative_position),
            ),
            (
                "capture_radius".to_string(),
                self.capture_radius.to_string(),
            ),
            ("dt".to_string(), self.dt.to_string()),
        ];
        if !self.overrides.is_empty() {
            out.push(("overrides".to_string(), self.overrides.join(" ")));
        }
        out
    }
}

// ---- file schema ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: Option<String>,
    plant: Option<PathBuf>,
    controller: Option<String>,
    seed: Option<u64>,
    dt: Option<f64>,
    max_duration: Option<f64>,
    capture_radius: Option<f64>,
    initial_relative_position: Option<[f64; 3]>,
    pbvs_min_depth: Option<f64>,
    fov_half_angle_deg: Option<f64>,
    visual_loss_hold: Option<f64>,
    closing_speed_bound: Option<f64>,
    gains: Option<GainsSection>,
    weights: Option<WeightsSection>,
    turbulence: Option<TurbulenceSection>,
    bow_wave: Option<BowWaveSection>,
    drogue: Option<DrogueSection>,
    camera: Option<CameraSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GainsSection {
    table: Option<String>,
    k1: Option<f64>,
    k2: Option<f64>,
    k3: Option<f64>,
    k4: Option<f64>,
    k5: Option<f64>,
    a: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsSection {
    q_lon: Option<Vec<Vec<f64>>>,
    r_lon: Option<Vec<Vec<f64>>>,
    q_lat: Option<Vec<Vec<f64>>>,
    r_lat: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TurbulenceSection {
    level: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BowWaveSection {
    enabled: Option<bool>,
    activation_radius: Option<f64>,
    strength: Option<f64>,
    decay_exponent: Option<f64>,
    on_axis_direction: Option<[f64; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DrogueSection {
    gust_gain: Option<f64>,
    restoring_rate: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraSection {
    mount_offset: Option<[f64; 3]>,
    pose_error: Option<[f64; 3]>,
}

fn square(field: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>, ConfigError> {
    let n = rows.first().map(Vec::len).unwrap_or(0);
    let m = matrix(field, rows, n)?;
    if m.nrows() != m.ncols() {
        return Err(ConfigError::field(
            field,
            format!("must be square, got {}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(m)
}

impl ScenarioFile {
    fn resolve(self, base_dir: &Path) -> Result<ScenarioConfig, ConfigError> {
        let mut cfg = ScenarioConfig::nominal();
        if let Some(p) = self.plant {
            let path = if p.is_absolute() { p } else { base_dir.join(p) };
            cfg.plant = PlantModel::<f64>::from_file(&path)?;
            cfg.plant_source = path.display().to_string();
        }
        if let Some(cam) = &self.camera {
            if let Some(o) = cam.mount_offset {
                cfg.plant = cfg.plant.with_mount_offset(Vector3::from(o));
            }
            if let Some(dp) = cam.pose_error {
                cfg.pose_error = Vector3::from(dp);
            }
        }
        cfg.weights = LqrWeights::default_for(&cfg.plant);
        if let Some(name) = self.name {
            cfg.name = name;
        }
        if let Some(c) = self.controller {
            cfg.controller = c.parse().map_err(|e| ConfigError::field("controller", e))?;
        }
        if let Some(g) = self.gains {
            let table = match &g.table {
                Some(t) => t
                    .parse::<GainTable>()
                    .map_err(|e| ConfigError::field("gains.table", e))?,
                None => GainTable::Table1,
            };
            let base = table.gains();
            let custom = [g.k1, g.k2, g.k3, g.k4, g.k5, g.a]
                .iter()
                .any(Option::is_some);
            cfg.gains = OuterLoopGains {
                k1: g.k1.unwrap_or(base.k1),
                k2: g.k2.unwrap_or(base.k2),
                k3: g.k3.unwrap_or(base.k3),
                k4: g.k4.unwrap_or(base.k4),
                k5: g.k5.unwrap_or(base.k5),
                a: g.a.unwrap_or(base.a),
            };
            cfg.gains_label = if custom {
                "custom".into()
            } else {
                table.to_string()
            };
        }
        if let Some(w) = self.weights {
            for (field, src, dst) in [
                ("weights.q_lon", &w.q_lon, &mut cfg.weights.q_lon),
                ("weights.r_lon", &w.r_lon, &mut cfg.weights.r_lon),
                ("weights.q_lat", &w.q_lat, &mut cfg.weights.q_lat),
                ("weights.r_lat", &w.r_lat, &mut cfg.weights.r_lat),
            ] {
                if let Some(rows) = src {
                    *dst = square(field, rows)?;
                }
            }
        }
        if let Some(t) = self.turbulence {
            if let Some(level) = t.level {
                cfg.turbulence = parse_turbulence(&level)
                    .map_err(|e| ConfigError::field("turbulence.level", e))?;
            }
        }
        if let Some(b) = self.bow_wave {
            let d = BowWave::default();
            let bw = BowWave {
                activation_radius: b.activation_radius.unwrap_or(d.activation_radius),
                strength: b.strength.unwrap_or(d.strength),
                decay_exponent: b.decay_exponent.unwrap_or(d.decay_exponent),
                on_axis_direction: b
                    .on_axis_direction
                    .map(Vector3::from)
                    .unwrap_or(d.on_axis_direction),
            };
            cfg.bow_wave = if b.enabled.unwrap_or(true) {
                Some(bw)
            } else {
                None
            };
        }
        if let Some(d) = self.drogue {
            if let Some(v) = d.gust_gain {
                cfg.drogue_gust_gain = v;
            }
            if let Some(v) = d.restoring_rate {
                cfg.drogue_restoring_rate = v;
            }
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        take!(
            seed,
            dt,
            max_duration,
            capture_radius,
            pbvs_min_depth,
            fov_half_angle_deg,
            visual_loss_hold
        );
        if let Some(p) = self.initial_relative_position {
            cfg.initial_relative_position = Vector3::from(p);
        }
        cfg.closing_speed_bound = self.closing_speed_bound;
        Ok(cfg)
    }
}
