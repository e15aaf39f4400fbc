//! Vision-based docking control for probe-drogue aerial refueling.
//!
//! The crate is split along the control architecture:
//!
//! - [`vision`]: camera frames, pinhole projection, image error and the
//!   image interaction matrix.
//! - [`dynamics`]: the receiver's trimmed linear plant, camera velocity
//!   kinematics, seeded turbulence and the drogue/bow-wave disturbance.
//! - [`control`]: the image-based outer loop (plus a position-based baseline)
//!   and the integral-augmented LQR inner loop, including the Riccati solver.
//! - [`sim`]: scenario configuration, the closed-loop runner, docking
//!   detection, batch execution and CSV logs.
//!
//! The math is generic over the scalar type through [`Real`]; the aliases
//! below fix it to `f64`, which is what the simulator uses.

pub mod control;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod num;
pub mod sim;
pub mod vision;

pub use error::{ConfigError, SimError, SynthesisError, VisionError};
pub use num::Real;

pub type CameraInstallation = vision::CameraInstallation<f64>;
pub type ImagePoint = vision::ImagePoint<f64>;
pub type ImageError = vision::ImageError<f64>;
pub type RelativeGeometry = vision::RelativeGeometry<f64>;
pub type InteractionMatrix = vision::InteractionMatrix<f64>;

pub type PlantModel = dynamics::PlantModel<f64>;
pub type ReceiverState = dynamics::ReceiverState<f64>;
pub type ControlInput = dynamics::ControlInput<f64>;
pub type ActuatorLimits = dynamics::ActuatorLimits<f64>;
pub type DrogueModel = dynamics::DrogueModel<f64>;

pub type OuterLoopGains = control::OuterLoopGains<f64>;
pub type DesiredCameraVelocity = control::DesiredCameraVelocity<f64>;
pub type AugmentedPlant = control::AugmentedPlant<f64>;
pub type LqrWeights = control::LqrWeights<f64>;
pub type GainSet = control::GainSet<f64>;
pub type IntegratorState = control::IntegratorState<f64>;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
