//! Receiver plant, camera kinematics and disturbance models.

pub mod drogue;
pub mod integrate;
pub mod kinematics;
pub mod plant;
pub mod turbulence;

pub use drogue::{BowWave, DrogueModel};
pub use integrate::{rk4_linear, step_receiver, step_receiver_disturbed};
pub use kinematics::{
    camera_velocity, gust_forcing, receiver_velocity, rigid_body_camera_velocity, KinematicsForm,
};
pub use plant::{
    output_matrices, ActuatorLimits, Channel, ControlInput, LinearChannel, PlantModel,
    ReceiverState, StateLayout,
};
pub use turbulence::{TurbulenceLevel, TurbulenceModel};
