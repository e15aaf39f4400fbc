//! The closed-loop scenario runner.
//!
//! Positions are kept in the tanker frame as increments about the trimmed
//! formation. Each step: geometry and projection, outer law, channel
//! references, inner law with saturation, integrator update, plant step with
//! gust forcing, then camera and drogue kinematics.

use nalgebra::{DVector, Vector3};

use super::config::{ControllerKind, ScenarioConfig};
use super::log::{SimLog, StepRecord};
use super::outcome::{detect_docking, DockingOutcome, FailureReason};
use crate::control::{
    ibvs_outer, inner_control, pbvs_outer, synthesize_gains, to_channel_references,
    update_integrator, ChannelSignals, DesiredCameraVelocity, IntegratorState, Synthesis,
};
use crate::dynamics::{
    gust_forcing, rigid_body_camera_velocity, step_receiver_disturbed, DrogueModel, ReceiverState,
    TurbulenceModel,
};
use crate::error::SimError;
use crate::vision::{
    frame_rotation, image_error, project, CameraInstallation, ImagePoint, RelativeGeometry,
};

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub log: SimLog,
    pub outcome: DockingOutcome,
    pub warnings: Vec<String>,
}

/// Synthesizes gains and runs one scenario.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResult, SimError> {
    config.validate()?;
    let synthesis = synthesize_gains(&config.plant, &config.weights)?;
    run_with_gains(config, &synthesis)
}

/// Runs with gains already synthesized for `config.plant` and `config.weights`.
pub fn run_with_gains(
    config: &ScenarioConfig,
    synthesis: &Synthesis<f64>,
) -> Result<ScenarioResult, SimError> {
    let plant = &config.plant;
    let gains = &synthesis.gains;
    let dt = config.dt;
    let vs = plant.trim_airspeed;
    let rot = frame_rotation::<f64>();

    let mut warnings = Vec::new();
    if let Some(bound) = config.closing_speed_bound {
        if let Some(w) = config.gains.check_decay_margin(bound) {
            warnings.push(w);
        }
    }

    let install = CameraInstallation::new(plant.mount_offset).with_offset_error(config.pose_error);
    let offset = install.true_offset();
    let mut drogue_model = DrogueModel::new(Vector3::zeros(), vs);
    drogue_model.gust_gain = config.drogue_gust_gain;
    drogue_model.restoring_rate = config.drogue_restoring_rate;
    drogue_model.bow_wave = config.bow_wave;
    drogue_model.probe_offset = offset;

    // Camera starts at its mount point; the drogue sits at the configured
    // offset ahead of it.
    let mut camera_pos = offset;
    let nominal_drogue = offset + config.initial_relative_position;
    drogue_model.nominal_position = nominal_drogue;
    let mut drogue_pos = nominal_drogue;

    let mut turbulence = TurbulenceModel::new(config.turbulence, config.seed, vs);
    let mut gust = turbulence.sample_gust(dt);
    let mut state = ReceiverState::zeros(plant);
    let mut integ = IntegratorState::zeros(plant);
    let tan_fov = config.fov_half_angle_deg.to_radians().tan();
    let steps = (config.max_duration / dt).round() as usize;

    let mut log = SimLog::new(dt);
    let mut held: Option<DesiredCameraVelocity<f64>> = None;
    let mut lost_since: Option<f64> = None;
    let mut ended: Option<FailureReason> = None;

    for k in 0..=steps {
        let time = k as f64 * dt;
        let rel = RelativeGeometry::new(rot * (drogue_pos - camera_pos));
        let depth = rel.depth();
        let point = project(&rel)
            .ok()
            .filter(|p| p.x.abs() <= tan_fov && p.y.abs() <= tan_fov);
        let visible = point.is_some();

        let (e, v_des) = match point {
            Some(p) => {
                let e = image_error(&p, &ImagePoint::origin());
                let v = match config.controller {
                    ControllerKind::Ibvs => ibvs_outer(&e, depth, &config.gains),
                    ControllerKind::Pbvs => {
                        let est = RelativeGeometry::new(rel.position + rot * config.pose_error);
                        pbvs_outer(&est, config.pbvs_min_depth, &config.gains)
                    }
                };
                held = Some(v);
                lost_since = None;
                (e, v)
            }
            None => {
                lost_since.get_or_insert(time);
                let v =
                    held.unwrap_or_else(|| DesiredCameraVelocity::new(0.0, 0.0, config.gains.a));
                (crate::vision::ImageError::new(0.0, 0.0), v)
            }
        };

        let (lon_ref, lat_ref) = to_channel_references(&v_des);
        let desired = ChannelSignals {
            lon: DVector::from_column_slice(lon_ref.as_slice()),
            lat: DVector::from_element(1, lat_ref),
        };
        let measured = ChannelSignals::measured(plant, &state);
        let command = inner_control(&state, &integ, gains);
        let (input, saturated) = command.saturate(&plant.limits);

        let bow = drogue_model
            .bow_wave_velocity(
                &camera_pos,
                &drogue_pos,
                vs + state.lon[crate::dynamics::plant::lon::V],
            )
            .norm();
        log.records.push(StepRecord {
            time,
            lon: [state.lon[0], state.lon[1], state.lon[2], state.lon[3]],
            lat: [
                state.lat[0],
                state.lat[1],
                state.lat[2],
                state.lat[3],
                state.lat[4],
            ],
            input_cmd: [
                command.elevator,
                command.throttle,
                command.aileron,
                command.rudder,
            ],
            input: [input.elevator, input.throttle, input.aileron, input.rudder],
            saturated,
            visible,
            e_x: e.e_x,
            e_y: e.e_y,
            depth,
            rel_x: rel.position.x,
            rel_y: rel.position.y,
            v_des: [v_des.v_x, v_des.v_y, v_des.v_z],
            v_meas: [measured.lat[0], measured.lon[0], measured.lon[1]],
            q_lon: [integ.q_rlon[0], integ.q_rlon[1]],
            q_lat: integ.q_rlat[0],
            gust: [gust.x, gust.y, gust.z],
            drogue: [
                drogue_pos.x - nominal_drogue.x,
                drogue_pos.y - nominal_drogue.y,
                drogue_pos.z - nominal_drogue.z,
            ],
            bow_wave: bow,
        });

        if depth <= 0.0 || k == steps {
            break;
        }
        if let Some(t0) = lost_since {
            if time - t0 >= config.visual_loss_hold {
                ended = Some(FailureReason::VisualLoss);
                break;
            }
        }

        integ = update_integrator(&integ, &measured, &desired, dt, saturated);

        let (w_lon, w_lat) = gust_forcing(plant, &gust);
        let next = match step_receiver_disturbed(&state, &input, plant, &w_lon, &w_lat, dt) {
            Ok(s) => s,
            Err(_) => {
                ended = Some(FailureReason::Diverged);
                break;
            }
        };
        let forward_speed = vs + state.lon[crate::dynamics::plant::lon::V];
        let drogue_vel = rot.transpose()
            * drogue_model.drogue_velocity(&camera_pos, &drogue_pos, &gust, forward_speed)
            - (drogue_pos - nominal_drogue) * drogue_model.restoring_rate;
        let cam_vel_before = rot.transpose() * rigid_body_camera_velocity(&state, &offset, vs);
        let cam_vel_after = rot.transpose() * rigid_body_camera_velocity(&next, &offset, vs);
        camera_pos += (cam_vel_before + cam_vel_after) * (0.5 * dt);
        drogue_pos += drogue_vel * dt;
        state = next;
        gust = turbulence.sample_gust(dt);
    }

    let outcome = match ended {
        Some(reason) => DockingOutcome::failed_at_end(&log, reason),
        None => detect_docking(&log, config.capture_radius)?,
    };
    Ok(ScenarioResult {
        log,
        outcome,
        warnings,
    })
}
