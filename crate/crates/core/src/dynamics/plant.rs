//! Trimmed linear receiver model and its configuration file.

use std::path::Path;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::Deserialize;

use crate::error::{ConfigError, SynthesisError};
use crate::linalg;
use crate::num::Real;

/// Longitudinal state indices: `[theta, v, alpha, q]`.
pub mod lon {
    pub const THETA: usize = 0;
    pub const V: usize = 1;
    pub const ALPHA: usize = 2;
    pub const Q: usize = 3;
    pub const NAMES: [&str; 4] = ["theta", "v", "alpha", "q"];
}

/// Lateral state indices: `[psi, phi, beta, p, r]`.
pub mod lat {
    pub const PSI: usize = 0;
    pub const PHI: usize = 1;
    pub const BETA: usize = 2;
    pub const P: usize = 3;
    pub const R: usize = 4;
    pub const NAMES: [&str; 5] = ["psi", "phi", "beta", "p", "r"];
}

pub const DEFAULT_PLANT_TOML: &str = include_str!("../../../../configs/plant_default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Longitudinal,
    Lateral,
}

/// One decoupled channel: `x' = A x + B u`, measured velocity `y = C x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearChannel<T: Real> {
    pub a: DMatrix<T>,
    pub b: DMatrix<T>,
    pub c: DMatrix<T>,
}

impl<T: Real> LinearChannel<T> {
    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }
}

/// How the channel states map onto the camera kinematics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateLayout {
    /// `lon = [theta, v, alpha, q]`, `lat = [psi, phi, beta, p, r]`; output
    /// matrices derived from the mount offset and trim airspeed.
    Standard,
    /// Arbitrary dimensions with output matrices given explicitly. Usable
    /// for gain synthesis, not for scenario runs.
    Custom,
}

/// Symmetric actuator limits (magnitudes). Throttle is an increment about trim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorLimits<T: Real> {
    pub elevator: T,
    pub throttle: T,
    pub aileron: T,
    pub rudder: T,
}

impl<T: Real> Default for ActuatorLimits<T> {
    fn default() -> Self {
        let surface = T::lit(25f64.to_radians());
        Self {
            elevator: surface,
            throttle: T::lit(0.5),
            aileron: surface,
            rudder: surface,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput<T: Real> {
    pub elevator: T,
    pub throttle: T,
    pub aileron: T,
    pub rudder: T,
}

impl<T: Real> ControlInput<T> {
    pub fn zero() -> Self {
        Self::from_channels(&DVector::zeros(2), &DVector::zeros(2))
    }

    pub fn from_channels(lon_u: &DVector<T>, lat_u: &DVector<T>) -> Self {
        Self {
            elevator: lon_u[0],
            throttle: lon_u[1],
            aileron: lat_u[0],
            rudder: lat_u[1],
        }
    }

    pub fn lon(&self) -> DVector<T> {
        DVector::from_vec(vec![self.elevator, self.throttle])
    }

    pub fn lat(&self) -> DVector<T> {
        DVector::from_vec(vec![self.aileron, self.rudder])
    }

    /// Clamps every channel; the flag reports whether any actuator hit its limit.
    pub fn saturate(&self, limits: &ActuatorLimits<T>) -> (Self, bool) {
        let mut hit = false;
        let mut clamp = |v: T, lim: T| {
            if v > lim {
                hit = true;
                lim
            } else if v < -lim {
                hit = true;
                -lim
            } else {
                v
            }
        };
        let out = Self {
            elevator: clamp(self.elevator, limits.elevator),
            throttle: clamp(self.throttle, limits.throttle),
            aileron: clamp(self.aileron, limits.aileron),
            rudder: clamp(self.rudder, limits.rudder),
        };
        (out, hit)
    }
}

/// Trim-relative receiver state.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverState<T: Real> {
    pub lon: DVector<T>,
    pub lat: DVector<T>,
}

impl<T: Real> ReceiverState<T> {
    pub fn zeros(plant: &PlantModel<T>) -> Self {
        Self {
            lon: DVector::zeros(plant.lon.states()),
            lat: DVector::zeros(plant.lat.states()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lon
            .iter()
            .chain(self.lat.iter())
            .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantModel<T: Real> {
    pub lon: LinearChannel<T>,
    pub lat: LinearChannel<T>,
    pub trim_airspeed: T,
    /// Mount offset the controllers believe in; `c` matrices are built from it.
    pub mount_offset: Vector3<T>,
    pub limits: ActuatorLimits<T>,
    pub layout: StateLayout,
}

impl<T: Real> PlantModel<T> {
    /// Builds a plant in the standard layout, deriving both output matrices.
    pub fn standard(
        a_lon: DMatrix<T>,
        b_lon: DMatrix<T>,
        a_lat: DMatrix<T>,
        b_lat: DMatrix<T>,
        trim_airspeed: T,
        mount_offset: Vector3<T>,
        limits: ActuatorLimits<T>,
    ) -> Self {
        let (c_lon, c_lat) = output_matrices(&mount_offset, trim_airspeed);
        Self {
            lon: LinearChannel {
                a: a_lon,
                b: b_lon,
                c: c_lon,
            },
            lat: LinearChannel {
                a: a_lat,
                b: b_lat,
                c: c_lat,
            },
            trim_airspeed,
            mount_offset,
            limits,
            layout: StateLayout::Standard,
        }
    }

    pub fn channel(&self, channel: Channel) -> &LinearChannel<T> {
        match channel {
            Channel::Longitudinal => &self.lon,
            Channel::Lateral => &self.lat,
        }
    }

    /// Dimension and stabilizability checks; the standard layout must also
    /// show oscillatory short-period and Dutch-roll modes.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, ch, outs) in [("lon", &self.lon, 2usize), ("lat", &self.lat, 1usize)] {
            let n = ch.a.nrows();
            if !ch.a.is_square() {
                return Err(ConfigError::field(format!("{name}.a"), "must be square"));
            }
            if ch.b.nrows() != n || ch.b.ncols() != 2 {
                return Err(ConfigError::field(
                    format!("{name}.b"),
                    format!("expected {n}x2, got {}x{}", ch.b.nrows(), ch.b.ncols()),
                ));
            }
            let outs_ok = match self.layout {
                StateLayout::Standard => ch.c.nrows() == outs,
                StateLayout::Custom => ch.c.nrows() >= 1,
            };
            if !outs_ok || ch.c.ncols() != n {
                return Err(ConfigError::field(
                    format!("{name}.c"),
                    format!(
                        "expected {outs}x{n} (standard layout) or kx{n}, got {}x{}",
                        ch.c.nrows(),
                        ch.c.ncols()
                    ),
                ));
            }
            if let Some(mode) = linalg::uncontrollable_mode(&ch.a, &ch.b, T::lit(1e-9)) {
                return Err(ConfigError::Synthesis(SynthesisError::Unstabilizable {
                    re: mode.re.to_f64_lossy(),
                    im: mode.im.to_f64_lossy(),
                }));
            }
        }
        if !(self.trim_airspeed > T::zero()) {
            return Err(ConfigError::field("trim_airspeed", "must be positive"));
        }
        if self.layout == StateLayout::Standard {
            if self.lon.states() != lon::NAMES.len() || self.lat.states() != lat::NAMES.len() {
                return Err(ConfigError::field(
                    "lon.a",
                    "standard layout needs 4 lon and 5 lat states",
                ));
            }
            for (name, ch, mode) in [
                ("lon.a", &self.lon, "short-period"),
                ("lat.a", &self.lat, "Dutch-roll"),
            ] {
                let oscillatory = linalg::eigenvalues(&ch.a)
                    .iter()
                    .any(|c| c.im.abs() > T::lit(0.3));
                if !oscillatory {
                    return Err(ConfigError::field(
                        name,
                        format!("no oscillatory {mode} mode"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<PlantModel<f64>, ConfigError> {
        let raw: PlantFile = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        raw.into_model()
    }

    pub fn from_file(path: &Path) -> Result<PlantModel<f64>, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    /// Plant with its output matrices rebuilt for a different believed offset.
    pub fn with_mount_offset(&self, mount_offset: Vector3<T>) -> Self {
        let mut out = self.clone();
        out.mount_offset = mount_offset;
        if self.layout == StateLayout::Standard {
            let (c_lon, c_lat) = output_matrices(&mount_offset, self.trim_airspeed);
            out.lon.c = c_lon;
            out.lat.c = c_lat;
        }
        out
    }
}

impl PlantModel<f64> {
    pub fn default_transport() -> Self {
        Self::from_toml_str(DEFAULT_PLANT_TOML, "<built-in plant>")
            .expect("built-in plant file is valid")
    }
}

/// Velocity output matrices for the standard layout.
///
/// Longitudinal: `[v_down, -v_forward]` (the second row is the depth rate,
/// negative while closing). Lateral: `[v_right]`. All in the reference frame
/// for a camera at `offset` in receiver axes.
pub fn output_matrices<T: Real>(offset: &Vector3<T>, trim_airspeed: T) -> (DMatrix<T>, DMatrix<T>) {
    let (xc, zc) = (offset.x, offset.z);
    let vs = trim_airspeed;
    let mut c_lon = DMatrix::zeros(2, lon::NAMES.len());
    // v_down = -h' - x_c q, h' = V*(theta - alpha)
    c_lon[(0, lon::THETA)] = -vs;
    c_lon[(0, lon::ALPHA)] = vs;
    c_lon[(0, lon::Q)] = -xc;
    // depth rate = -(v + z_c q)
    c_lon[(1, lon::V)] = -T::one();
    c_lon[(1, lon::Q)] = -zc;
    let mut c_lat = DMatrix::zeros(1, lat::NAMES.len());
    // v_right = V*(psi + beta) + x_c r - z_c p
    c_lat[(0, lat::PSI)] = vs;
    c_lat[(0, lat::BETA)] = vs;
    c_lat[(0, lat::P)] = -zc;
    c_lat[(0, lat::R)] = xc;
    (c_lon, c_lat)
}

// ---- file schema ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlantFile {
    trim_airspeed: f64,
    camera: CameraSection,
    #[serde(default)]
    limits: Option<LimitsSection>,
    lon: ChannelSection,
    lat: ChannelSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraSection {
    mount_offset: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitsSection {
    elevator_deg: f64,
    throttle: f64,
    aileron_deg: f64,
    rudder_deg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelSection {
    states: Vec<String>,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    #[serde(default)]
    c: Option<Vec<Vec<f64>>>,
}

pub(crate) fn matrix(
    field: &str,
    rows: &[Vec<f64>],
    expect_cols: usize,
) -> Result<DMatrix<f64>, ConfigError> {
    if rows.is_empty() {
        return Err(ConfigError::field(field, "matrix has no rows"));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != expect_cols {
            return Err(ConfigError::field(
                field,
                format!("row {i} has {} entries, expected {expect_cols}", row.len()),
            ));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(ConfigError::field(
                field,
                format!("entry ({i},{j}) is not finite"),
            ));
        }
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), expect_cols, &flat))
}

impl PlantFile {
    fn into_model(self) -> Result<PlantModel<f64>, ConfigError> {
        let limits = match self.limits {
            None => ActuatorLimits::default(),
            Some(l) => {
                for (name, v) in [
                    ("limits.elevator_deg", l.elevator_deg),
                    ("limits.throttle", l.throttle),
                    ("limits.aileron_deg", l.aileron_deg),
                    ("limits.rudder_deg", l.rudder_deg),
                ] {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(ConfigError::field(name, "must be a positive number"));
                    }
                }
                ActuatorLimits {
                    elevator: l.elevator_deg.to_radians(),
                    throttle: l.throttle,
                    aileron: l.aileron_deg.to_radians(),
                    rudder: l.rudder_deg.to_radians(),
                }
            }
        };
        let offset = Vector3::from(self.camera.mount_offset);
        if !offset.iter().all(|v| v.is_finite()) {
            return Err(ConfigError::field(
                "camera.mount_offset",
                "entries must be finite",
            ));
        }
        let n_lon = self.lon.states.len();
        let n_lat = self.lat.states.len();
        let a_lon = matrix("lon.a", &self.lon.a, n_lon)?;
        let b_lon = matrix("lon.b", &self.lon.b, 2)?;
        let a_lat = matrix("lat.a", &self.lat.a, n_lat)?;
        let b_lat = matrix("lat.b", &self.lat.b, 2)?;
        if a_lon.nrows() != n_lon {
            return Err(ConfigError::field(
                "lon.a",
                format!("expected {n_lon} rows"),
            ));
        }
        if a_lat.nrows() != n_lat {
            return Err(ConfigError::field(
                "lat.a",
                format!("expected {n_lat} rows"),
            ));
        }

        let standard_names = self.lon.states.iter().map(String::as_str).eq(lon::NAMES)
            && self.lat.states.iter().map(String::as_str).eq(lat::NAMES);
        let model = match (self.lon.c, self.lat.c) {
            (None, None) => {
                if !standard_names {
                    return Err(ConfigError::field(
                        "lon.states",
                        format!(
                            "without explicit `c` matrices the states must be {:?} and {:?}",
                            lon::NAMES,
                            lat::NAMES
                        ),
                    ));
                }
                PlantModel::standard(
                    a_lon,
                    b_lon,
                    a_lat,
                    b_lat,
                    self.trim_airspeed,
                    offset,
                    limits,
                )
            }
            (Some(c_lon), Some(c_lat)) => PlantModel {
                lon: LinearChannel {
                    a: a_lon,
                    b: b_lon,
                    c: matrix("lon.c", &c_lon, n_lon)?,
                },
                lat: LinearChannel {
                    a: a_lat,
                    b: b_lat,
                    c: matrix("lat.c", &c_lat, n_lat)?,
                },
                trim_airspeed: self.trim_airspeed,
                mount_offset: offset,
                limits,
                layout: StateLayout::Custom,
            },
            _ => {
                return Err(ConfigError::field(
                    "lat.c",
                    "give `c` for both channels or for neither",
                ));
            }
        };
        model.validate()?;
        Ok(model)
    }
}
