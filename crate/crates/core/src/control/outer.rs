//! Outer-loop velocity commands.
//!
//! The commanded vector is `[v_x, v_y, v_z]` in the reference frame. Lateral
//! components are camera velocities. The axial component is the commanded
//! depth rate: negative while approaching and never above `a < 0`, so the
//! receiver always closes at `|a|` or faster. Large image errors reduce the
//! closing speed toward that floor.

use nalgebra::Vector2;

use crate::error::ConfigError;
use crate::num::Real;
use crate::vision::{ImageError, RelativeGeometry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterLoopGains<T: Real> {
    pub k1: T,
    pub k2: T,
    pub k3: T,
    pub k4: T,
    pub k5: T,
    /// Terminal closing-velocity floor (negative) [m/s].
    pub a: T,
}

impl<T: Real> OuterLoopGains<T> {
    pub fn new(k1: T, k2: T, k3: T, k4: T, k5: T, a: T) -> Result<Self, ConfigError> {
        let g = Self {
            k1,
            k2,
            k3,
            k4,
            k5,
            a,
        };
        g.validate()?;
        Ok(g)
    }

    /// Gains for turbulence runs.
    pub fn table1() -> Self {
        Self::from_f64(1.0, 2.0, 0.3, 3.0, 1.0, -0.5)
    }

    /// Gains for bow-wave runs.
    pub fn table2() -> Self {
        Self::from_f64(3.0, 3.0, 0.5, 5.0, 2.0, -0.5)
    }

    fn from_f64(k1: f64, k2: f64, k3: f64, k4: f64, k5: f64, a: f64) -> Self {
        Self {
            k1: T::lit(k1),
            k2: T::lit(k2),
            k3: T::lit(k3),
            k4: T::lit(k4),
            k5: T::lit(k5),
            a: T::lit(a),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, k) in [
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("k4", self.k4),
            ("k5", self.k5),
        ] {
            if !(k > T::zero()) {
                return Err(ConfigError::field(format!("gains.{name}"), "must be > 0"));
            }
        }
        if !(self.a < T::zero()) {
            return Err(ConfigError::field("gains.a", "must be < 0"));
        }
        Ok(())
    }

    /// Image-error decay needs `k1, k2` above the largest closing speed the
    /// run will see. Returns a warning when `closing_speed_bound` violates it.
    pub fn check_decay_margin(&self, closing_speed_bound: T) -> Option<String> {
        let low: Vec<&str> = [("k1", self.k1), ("k2", self.k2)]
            .into_iter()
            .filter(|(_, k)| *k <= closing_speed_bound)
            .map(|(n, _)| n)
            .collect();
        if low.is_empty() {
            None
        } else {
            Some(format!(
                "{} <= closing-speed bound {:.3} m/s: image error may grow while closing fast",
                low.join(", "),
                closing_speed_bound.to_f64_lossy()
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesiredCameraVelocity<T: Real> {
    pub v_x: T,
    pub v_y: T,
    pub v_z: T,
}

impl<T: Real> DesiredCameraVelocity<T> {
    pub fn new(v_x: T, v_y: T, v_z: T) -> Self {
        Self { v_x, v_y, v_z }
    }
}

fn closing_command<T: Real>(depth: T, e_x: T, e_y: T, gains: &OuterLoopGains<T>) -> T {
    let v = -gains.k3 * depth + gains.k4 * e_x.abs() + gains.k5 * e_y.abs();
    v.min(gains.a)
}

/// Image-based law: `v_x = k1 e_x`, `v_y = k2 e_y`,
/// `v_z = min(-k3 z + k4 |e_x| + k5 |e_y|, a)`.
pub fn ibvs_outer<T: Real>(
    error: &ImageError<T>,
    depth: T,
    gains: &OuterLoopGains<T>,
) -> DesiredCameraVelocity<T> {
    DesiredCameraVelocity::new(
        gains.k1 * error.e_x,
        gains.k2 * error.e_y,
        closing_command(depth, error.e_x, error.e_y, gains),
    )
}

/// Position-based baseline on a 3D estimate. The estimated lateral offsets
/// are divided by the estimated depth, floored at `min_depth`, so with a
/// perfect estimate this coincides with the image-based law.
pub fn pbvs_outer<T: Real>(
    estimated_position: &RelativeGeometry<T>,
    min_depth: T,
    gains: &OuterLoopGains<T>,
) -> DesiredCameraVelocity<T> {
    let p = &estimated_position.position;
    let z = p.z.max(min_depth);
    let (e_x, e_y) = (p.x / z, p.y / z);
    DesiredCameraVelocity::new(
        gains.k1 * e_x,
        gains.k2 * e_y,
        closing_command(p.z, e_x, e_y, gains),
    )
}

/// Splits the command into the longitudinal `[v_y, v_z]` and lateral `v_x` references.
pub fn to_channel_references<T: Real>(v: &DesiredCameraVelocity<T>) -> (Vector2<T>, T) {
    (Vector2::new(v.v_y, v.v_z), v.v_x)
}

pub fn from_channel_references<T: Real>(lon: &Vector2<T>, lat: T) -> DesiredCameraVelocity<T> {
    DesiredCameraVelocity::new(lat, lon[0], lon[1])
}
