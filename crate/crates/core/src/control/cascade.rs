use nalgebra::{UnitQuaternion, Vector3};

use super::attitude::{pid_attitude, wrench_demand, AttitudeReference, PidGains};
use super::impedance::{impedance_force, ImpedanceGains, TrajectoryPoint};
use super::ControlError;
use crate::allocation::{allocate, clamp_command, mix_command, AllocationError, AllocationResult};
use crate::frames::{world_to_target, TargetFrame};
use crate::params::VehicleParams;
use crate::types::{ActuatorCommand, BodyWrench5, VehicleState};
use crate::GRAVITY;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub impedance: ImpedanceGains,
    pub pid: PidGains,
    pub attitude: AttitudeReference,
    /// Feed the contact-force estimate forward into the impedance law. Off by
    /// default: with it on, contact is cancelled rather than complied with.
    pub compensate_contact: bool,
}

/// Mutable controller memory, owned by one control loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    pub integral: Vector3<f64>,
    pub prev_error: Vector3<f64>,
    /// Latest perceived target frame (zero-order hold between samples).
    pub held_frame: TargetFrame,
    /// Latest contact-force estimate in target axes, N.
    pub contact_estimate: Vector3<f64>,
}

impl ControllerState {
    pub fn new(held_frame: TargetFrame) -> Self {
        Self {
            integral: Vector3::zeros(),
            prev_error: Vector3::zeros(),
            held_frame,
            contact_estimate: Vector3::zeros(),
        }
    }
}

/// Everything one cascade tick computed, for logging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeOutput {
    /// Vehicle position and velocity in the held target frame.
    pub lambda: Vector3<f64>,
    pub lambda_dot: Vector3<f64>,
    pub force_t: Vector3<f64>,
    pub attitude_ref: UnitQuaternion<f64>,
    pub torque: Vector3<f64>,
    pub wrench: BodyWrench5,
    pub allocation: AllocationResult,
}

/// One 300 Hz tick: impedance law → attitude reference → PID → allocation.
pub fn step_cascade(
    state: &VehicleState,
    ctrl: &mut ControllerState,
    traj: &TrajectoryPoint,
    cfg: &ControllerConfig,
    params: &VehicleParams,
    dt: f64,
) -> Result<CascadeOutput, ControlError> {
    let frame = ctrl.held_frame;
    let lambda = world_to_target(&state.position_w, &frame);
    let lambda_dot = frame.vector_to_target(&state.velocity_w);
    let gravity_t = frame.vector_to_target(&Vector3::new(0.0, 0.0, -params.mass() * GRAVITY));
    let contact_ff = if cfg.compensate_contact {
        ctrl.contact_estimate
    } else {
        Vector3::zeros()
    };
    let force_t = impedance_force(
        &lambda,
        &lambda_dot,
        traj,
        &contact_ff,
        &gravity_t,
        &cfg.impedance,
        params.mass(),
    );
    let demand = wrench_demand(&force_t, &frame, &cfg.attitude)?;
    let torque = pid_attitude(
        &state.attitude,
        &state.omega_b,
        &demand.attitude_ref,
        &cfg.pid,
        ctrl,
        dt,
    );
    let wrench = BodyWrench5::from_parts((demand.f_py, demand.f_pz), torque);
    let allocation = match allocate(&wrench, params) {
        Ok(r) => r,
        Err(AllocationError::ZeroThrust) => idle_command(&wrench, params),
        Err(e) => return Err(e.into()),
    };
    Ok(CascadeOutput {
        lambda,
        lambda_dot,
        force_t,
        attitude_ref: demand.attitude_ref,
        torque,
        wrench,
        allocation,
    })
}

/// Minimum thrust on every rotor, arms vertical; flagged as saturated.
fn idle_command(requested: &BodyWrench5, params: &VehicleParams) -> AllocationResult {
    let command = clamp_command(
        &ActuatorCommand {
            thrusts: [params.thrust_min(); 4],
            tilt: 0.0,
        },
        params,
    );
    AllocationResult {
        command,
        saturated: true,
        residual: mix_command(&command, params) - *requested,
    }
}
