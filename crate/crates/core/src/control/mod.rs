//! Control laws.

pub mod inner;
pub mod outer;
pub mod riccati;

pub use inner::{
    augment, inner_control, synthesize_channel, synthesize_gains, update_integrator,
    AugmentedPlant, ChannelSignals, ChannelSynthesis, GainSet, IntegratorState, LqrWeights,
    Synthesis,
};
pub use outer::{
    from_channel_references, ibvs_outer, pbvs_outer, to_channel_references, DesiredCameraVelocity,
    OuterLoopGains,
};
pub use riccati::{care_residual, solve_care, solve_care_with, CareOptions, CareSolution};
