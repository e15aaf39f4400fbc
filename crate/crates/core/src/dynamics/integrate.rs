//! Fixed-step integration of the linear receiver channels.

use nalgebra::{DMatrix, DVector};

use super::plant::{ControlInput, PlantModel, ReceiverState};
use crate::error::IntegrationDiverged;
use crate::num::Real;

/// One classical RK4 step of `x' = A x + B u + w` with `u` and `w` held
/// constant over the step.
pub fn rk4_linear<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    x: &DVector<T>,
    u: &DVector<T>,
    w: &DVector<T>,
    dt: T,
) -> DVector<T> {
    let forcing = b * u + w;
    let f = |x: &DVector<T>| a * x + &forcing;
    let half = dt * T::lit(0.5);
    let k1 = f(x);
    let k2 = f(&(x + &k1 * half));
    let k3 = f(&(x + &k2 * half));
    let k4 = f(&(x + &k3 * dt));
    x + (k1 + k2 * T::lit(2.0) + k3 * T::lit(2.0) + k4) * (dt / T::lit(6.0))
}

/// Advances both channels by `dt` with the input held constant.
pub fn step_receiver<T: Real>(
    state: &ReceiverState<T>,
    input: &ControlInput<T>,
    plant: &PlantModel<T>,
    dt: T,
) -> Result<ReceiverState<T>, IntegrationDiverged> {
    let w_lon = DVector::zeros(plant.lon.states());
    let w_lat = DVector::zeros(plant.lat.states());
    step_receiver_disturbed(state, input, plant, &w_lon, &w_lat, dt)
}

/// As [`step_receiver`] with additive state-derivative disturbances.
pub fn step_receiver_disturbed<T: Real>(
    state: &ReceiverState<T>,
    input: &ControlInput<T>,
    plant: &PlantModel<T>,
    w_lon: &DVector<T>,
    w_lat: &DVector<T>,
    dt: T,
) -> Result<ReceiverState<T>, IntegrationDiverged> {
    debug_assert!(dt > T::zero());
    let next = ReceiverState {
        lon: rk4_linear(
            &plant.lon.a,
            &plant.lon.b,
            &state.lon,
            &input.lon(),
            w_lon,
            dt,
        ),
        lat: rk4_linear(
            &plant.lat.a,
            &plant.lat.b,
            &state.lat,
            &input.lat(),
            w_lat,
            dt,
        ),
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(IntegrationDiverged)
    }
}
