//! Camera velocity in the reference frame from the receiver state.

use nalgebra::{DVector, Vector3};

use super::plant::{lat, lon, PlantModel, ReceiverState};
use crate::num::Real;
use crate::vision::{frame_rotation, CameraInstallation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KinematicsForm {
    /// Body velocity from airspeed and aerodynamic angles, plus lever-arm terms.
    Exact,
    /// Small-signal form with `p = r = beta = 0` in the translational part
    /// and products of increments dropped.
    Linearized,
}

fn rates<T: Real>(state: &ReceiverState<T>) -> Vector3<T> {
    Vector3::new(state.lat[lat::P], state.lon[lon::Q], state.lat[lat::R])
}

/// Camera velocity `v_c^re` using the true camera offset.
///
/// Requires the standard state layout.
pub fn camera_velocity<T: Real>(
    state: &ReceiverState<T>,
    install: &CameraInstallation<T>,
    form: KinematicsForm,
) -> Vector3<T> {
    let off = install.true_offset();
    let (xc, yc, zc) = (off.x, off.y, off.z);
    let v = state.lon[lon::V];
    let alpha = state.lon[lon::ALPHA];
    let q = state.lon[lon::Q];
    let beta = state.lat[lat::BETA];
    let p = state.lat[lat::P];
    let r = state.lat[lat::R];
    match form {
        KinematicsForm::Exact => Vector3::new(
            v * beta.sin() + xc * r - zc * p,
            v * alpha.sin() * beta.cos() + yc * p - xc * q,
            v * alpha.cos() * beta.cos() + zc * q - yc * r,
        ),
        KinematicsForm::Linearized => Vector3::new(xc * r - zc * p, -xc * q, v + zc * q),
    }
}

/// Receiver translational velocity in the tanker frame (x fwd, y right,
/// z down) from the trim linearization: `[v, V*(psi + beta), -V*(theta - alpha)]`.
pub fn receiver_velocity<T: Real>(state: &ReceiverState<T>, trim_airspeed: T) -> Vector3<T> {
    let vs = trim_airspeed;
    Vector3::new(
        state.lon[lon::V],
        vs * (state.lat[lat::PSI] + state.lat[lat::BETA]),
        -vs * (state.lon[lon::THETA] - state.lon[lon::ALPHA]),
    )
}

/// Rigid-body camera velocity in the reference frame: receiver velocity plus
/// `omega x offset`, rotated into camera axes. This is what moves the camera
/// in the simulator.
pub fn rigid_body_camera_velocity<T: Real>(
    state: &ReceiverState<T>,
    offset: &Vector3<T>,
    trim_airspeed: T,
) -> Vector3<T> {
    let tanker = receiver_velocity(state, trim_airspeed) + rates(state).cross(offset);
    frame_rotation::<T>() * tanker
}

/// Effect of a body-axis gust `[u, v, w]` on the state derivatives: the
/// gust shifts the aerodynamic angles by `-w/V*` and `-v/V*`.
pub fn gust_forcing<T: Real>(plant: &PlantModel<T>, gust: &Vector3<T>) -> (DVector<T>, DVector<T>) {
    let vs = plant.trim_airspeed;
    let d_alpha = -gust.z / vs;
    let d_beta = -gust.y / vs;
    let w_lon = plant.lon.a.column(lon::ALPHA) * d_alpha;
    let w_lat = plant.lat.a.column(lat::BETA) * d_beta;
    (w_lon, w_lat)
}
