//! Drogue motion under gusts and the receiver's bow wave.
//!
//! The bow wave is a parametric surrogate: once the probe is within
//! `activation_radius` of the drogue, the receiver's pressure field pushes
//! the drogue radially away from the receiver's longitudinal axis, with a
//! speed that grows as the probe-drogue separation shrinks. The axis runs
//! through the receiver origin, so a probe mounted above the fuselage sees
//! the drogue pushed up and out rather than across its own axis.

use nalgebra::Vector3;

use crate::num::Real;
use crate::vision::frame_rotation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BowWave<T: Real> {
    pub activation_radius: T,
    /// Induced speed at zero separation and trim closing speed [m/s].
    pub strength: T,
    pub decay_exponent: T,
    /// Push direction (tanker frame) used when the drogue sits exactly on
    /// the receiver axis. Defaults to up.
    pub on_axis_direction: Vector3<T>,
}

impl<T: Real> Default for BowWave<T> {
    fn default() -> Self {
        Self {
            activation_radius: T::lit(4.0),
            strength: T::lit(0.6),
            decay_exponent: T::one(),
            on_axis_direction: Vector3::new(T::zero(), T::zero(), -T::one()),
        }
    }
}

impl<T: Real> BowWave<T> {
    /// Induced speed for separation `distance` at forward-speed ratio `speed_ratio`.
    pub fn magnitude(&self, distance: T, speed_ratio: T) -> T {
        if !(distance < self.activation_radius) {
            return T::zero();
        }
        let frac = T::one() - distance / self.activation_radius;
        self.strength * frac.powf(self.decay_exponent) * speed_ratio
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrogueModel<T: Real> {
    pub nominal_position: Vector3<T>,
    /// Drogue velocity per unit gust velocity.
    pub gust_gain: T,
    pub bow_wave: Option<BowWave<T>>,
    /// Hose restoring rate pulling the drogue back to its nominal position [1/s].
    pub restoring_rate: T,
    /// Speed that normalizes the bow-wave intensity; the receiver trim airspeed.
    pub trim_airspeed: T,
    /// Vector from the receiver origin to the probe, tanker axes [m].
    pub probe_offset: Vector3<T>,
}

impl<T: Real> DrogueModel<T> {
    pub fn new(nominal_position: Vector3<T>, trim_airspeed: T) -> Self {
        Self {
            nominal_position,
            gust_gain: T::lit(0.3),
            bow_wave: None,
            restoring_rate: T::lit(0.5),
            trim_airspeed,
            probe_offset: Vector3::zeros(),
        }
    }

    /// Bow-wave velocity in the tanker frame.
    pub fn bow_wave_velocity(
        &self,
        probe_pos: &Vector3<T>,
        drogue_pos: &Vector3<T>,
        forward_speed: T,
    ) -> Vector3<T> {
        let Some(bw) = &self.bow_wave else {
            return Vector3::zeros();
        };
        let distance = (drogue_pos - probe_pos).norm();
        let mag = bw.magnitude(distance, forward_speed / self.trim_airspeed);
        if mag == T::zero() {
            return Vector3::zeros();
        }
        let axis_point = probe_pos - self.probe_offset;
        let radial = Vector3::new(
            T::zero(),
            drogue_pos.y - axis_point.y,
            drogue_pos.z - axis_point.z,
        );
        let n = radial.norm();
        let dir = if n > T::zero() {
            radial / n
        } else {
            bw.on_axis_direction.normalize()
        };
        dir * mag
    }

    /// Drogue velocity `v_d^re` in the reference frame.
    pub fn drogue_velocity(
        &self,
        probe_pos: &Vector3<T>,
        drogue_pos: &Vector3<T>,
        gust: &Vector3<T>,
        forward_speed: T,
    ) -> Vector3<T> {
        let tanker =
            gust * self.gust_gain + self.bow_wave_velocity(probe_pos, drogue_pos, forward_speed);
        frame_rotation::<T>() * tanker
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn drogue_with_wave() -> DrogueModel<f64> {
        let mut d = DrogueModel::new(Vector3::zeros(), 120.0);
        d.bow_wave = Some(BowWave::default());
        d
    }

    #[test]
    fn far_away_and_calm_is_zero() {
        let d = drogue_with_wave();
        let v = d.drogue_velocity(
            &Vector3::new(-10.0, 0.0, 0.0),
            &Vector3::zeros(),
            &Vector3::zeros(),
            120.0,
        );
        assert_eq!(v, Vector3::zeros());
    }

    #[test]
    fn zero_separation_gives_full_strength() {
        let d = drogue_with_wave();
        let v = d.drogue_velocity(
            &Vector3::zeros(),
            &Vector3::zeros(),
            &Vector3::zeros(),
            120.0,
        );
        assert_relative_eq!(v.norm(), 0.6, epsilon = 1e-15);
        // on-axis push is upward: tanker -z -> camera -y
        assert_relative_eq!(v.y, -0.6, epsilon = 1e-15);
    }

    #[test]
    fn half_radius_linear_decay() {
        let d = drogue_with_wave();
        let probe = Vector3::new(-2.0, 0.0, 0.0);
        let v = d.drogue_velocity(&probe, &Vector3::zeros(), &Vector3::zeros(), 60.0);
        assert_relative_eq!(v.norm(), 0.6 / 2.0 * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn push_is_radial_from_receiver_axis() {
        let mut d = drogue_with_wave();
        d.probe_offset = Vector3::new(8.0, 0.0, -1.2);
        // probe at its mount point, drogue ahead and slightly left of it
        let probe = Vector3::new(8.0, 0.0, -1.2);
        let drogue = Vector3::new(9.0, -0.3, -1.2);
        let v = d.bow_wave_velocity(&probe, &drogue, 120.0);
        assert_eq!(v.x, 0.0);
        assert!(v.y < 0.0 && v.z < 0.0, "pushed left and up: {v:?}");
        let expected = 0.6 * (1.0 - (1.09f64).sqrt() / 4.0);
        assert_relative_eq!(v.norm(), expected, epsilon = 1e-15);
        assert_relative_eq!(v.z / v.y, 1.2 / 0.3, epsilon = 1e-12);
    }

    #[test]
    fn crossing_the_probe_axis_does_not_flip_the_push() {
        let mut d = drogue_with_wave();
        d.probe_offset = Vector3::new(8.0, 0.0, -1.2);
        let probe = Vector3::new(8.0, 0.0, -1.2);
        let above = d.bow_wave_velocity(&probe, &Vector3::new(9.0, 0.0, -1.25), 120.0);
        let below = d.bow_wave_velocity(&probe, &Vector3::new(9.0, 0.0, -1.15), 120.0);
        assert!(above.z < 0.0 && below.z < 0.0);
    }

    #[test]
    fn continuous_at_activation_radius() {
        let bw = BowWave::<f64>::default();
        assert_eq!(bw.magnitude(4.0, 1.0), 0.0);
        assert!(bw.magnitude(4.0 - 1e-9, 1.0) < 1e-9);
    }

    #[test]
    fn gust_coupling_rotated_into_reference_frame() {
        let d = DrogueModel::new(Vector3::zeros(), 120.0);
        let v = d.drogue_velocity(
            &Vector3::new(-30.0, 0.0, 0.0),
            &Vector3::zeros(),
            &Vector3::new(1.0, 2.0, 3.0),
            120.0,
        );
        assert_relative_eq!(v, Vector3::new(0.6, 0.9, 0.3), epsilon = 1e-15);
    }
}
