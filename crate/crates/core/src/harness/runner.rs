use thiserror::Error;

use super::log::{RunLog, TickRecord};
use super::scenario::Scenario;
use super::trajectory::Trajectory;
use crate::control::{step_cascade, ControlError, ControllerState};
use crate::frames::world_to_target;
use crate::sim::{accelerations, apply_actuators, contact_force, integrate_rigid_body, PerceptionSource, SimError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("tick {tick}: controller: {source}")]
    Control {
        tick: u64,
        #[source]
        source: ControlError,
    },
    #[error("tick {tick}: simulation: {source}")]
    Sim {
        tick: u64,
        #[source]
        source: SimError,
    },
}

impl RunError {
    pub fn tick(&self) -> u64 {
        match self {
            RunError::Control { tick, .. } | RunError::Sim { tick, .. } => *tick,
        }
    }
}

/// Builds the reference trajectory for a scenario: starts at the vehicle's
/// initial target-frame position; press depths are measured from the point
/// where the tip, at the initial attitude, meets the workpiece.
pub fn scenario_trajectory(scenario: &Scenario) -> Trajectory {
    let frame = scenario.target_frame();
    let start = world_to_target(&scenario.initial.position, &frame);
    let contact_z = match &scenario.workpiece {
        Some(wp) => {
            let surface_z = world_to_target(&wp.point_w, &frame).z;
            let tip_t = frame.vector_to_target(&(scenario.initial_attitude() * wp.tip_offset_b));
            surface_z - tip_t.z
        }
        None => 0.0,
    };
    Trajectory::compile(&scenario.trajectory, start, contact_z)
}

/// Runs the closed loop for the scenario duration at its tick rate.
///
/// Per tick: perception delivery, contact sensing, one cascade step, actuator
/// update, then one RK4 step of the rigid body. Deterministic for a given
/// scenario (including seed).
pub fn run(scenario: &Scenario) -> Result<RunLog, RunError> {
    let params = &scenario.params;
    let truth = scenario.target_frame();
    let trajectory = scenario_trajectory(scenario);
    let dt = scenario.dt();
    let ticks = scenario.ticks();
    let gains = scenario.controller.impedance;
    let mass = params.mass();
    let wp = scenario.workpiece.as_ref();

    let mut perception = PerceptionSource::new(scenario.perception);
    let mut ctrl = ControllerState::new(truth);
    let mut held_id = None;
    let mut state = scenario.initial_state();
    let mut records = Vec::with_capacity(ticks as usize);

    for tick in 0..ticks {
        let t = tick as f64 / scenario.rate_hz;
        if let Some(sample) = perception.perceive(&truth, t) {
            ctrl.held_frame = sample.frame;
            held_id = Some(sample.id);
        }
        let contact_w = wp.map(|w| contact_force(&state, w)).unwrap_or_default();
        let measured = perception.measure_force(&contact_w);
        ctrl.contact_estimate = ctrl.held_frame.vector_to_target(&measured);

        let traj = trajectory.sample(t);
        let out = step_cascade(&state, &mut ctrl, &traj, &scenario.controller, params, dt)
            .map_err(|source| RunError::Control { tick, source })?;

        let actuated = apply_actuators(&state, &out.allocation.command, &scenario.actuators, params, dt);
        let (accel_w, _) = accelerations(&actuated, wp, params);

        let lambda = world_to_target(&state.position_w, &truth);
        let lambda_dot = truth.vector_to_target(&state.velocity_w);
        let lambda_ddot = truth.vector_to_target(&accel_w);
        let error = lambda - traj.position;
        let error_dot = lambda_dot - traj.velocity;
        let error_ddot = lambda_ddot - traj.acceleration;
        let contact_t = truth.vector_to_target(&contact_w);
        let residual = error_ddot * mass
            + gains.damping.component_mul(&error_dot)
            + gains.stiffness.component_mul(&error)
            - contact_t;

        records.push(TickRecord {
            tick,
            t,
            state,
            lambda,
            lambda_d: traj.position,
            error,
            force_t: out.force_t,
            contact_t,
            command: out.allocation.command,
            saturated: out.allocation.saturated,
            perception_id: held_id,
            residual,
        });

        state = integrate_rigid_body(&actuated, wp, params, dt).map_err(|source| RunError::Sim { tick, source })?;
    }

    Ok(RunLog {
        scenario: scenario.name.clone(),
        dt,
        records,
    })
}

/// Static contact force the impedance model predicts for a linear wall:
/// `K·k_w·δ / (K + k_w)`.
pub fn predicted_press_force(stiffness: f64, wall_stiffness: f64, depth: f64) -> f64 {
    stiffness * wall_stiffness * depth / (stiffness + wall_stiffness)
}
