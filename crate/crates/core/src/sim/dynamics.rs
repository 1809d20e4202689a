use nalgebra::{Quaternion, UnitQuaternion, Vector3};

use super::contact::{contact_wrench, WorkpieceModel};
use super::SimError;
use crate::allocation::{clamp_command, mix_forward};
use crate::params::VehicleParams;
use crate::types::{ActuatorCommand, VehicleState};
use crate::GRAVITY;

/// Speed above which a run is declared diverged, m/s.
pub const DIVERGENCE_SPEED: f64 = 1e3;

/// Rotor and servo dynamics. Zero time constants and no rate limit give an
/// ideal actuator that reaches the command within the tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorModel {
    /// First-order rotor thrust lag, s.
    pub rotor_time_constant: f64,
    /// First-order servo lag, s.
    pub servo_time_constant: f64,
    /// Servo slew limit, rad/s. `None` is unlimited.
    pub servo_rate_limit: Option<f64>,
}

impl ActuatorModel {
    pub fn ideal() -> Self {
        Self {
            rotor_time_constant: 0.0,
            servo_time_constant: 0.0,
            servo_rate_limit: None,
        }
    }

    /// 30 ms rotor lag; servo slews at the airframe's rated tilt rate.
    pub fn typical(params: &VehicleParams) -> Self {
        Self {
            rotor_time_constant: 0.03,
            servo_time_constant: 0.0,
            servo_rate_limit: Some(params.tilt_rate_max()),
        }
    }

    pub fn validate(&self) -> Result<(), (&'static str, &'static str)> {
        if !(self.rotor_time_constant.is_finite() && self.rotor_time_constant >= 0.0) {
            return Err(("rotor_time_constant", "must be >= 0"));
        }
        if !(self.servo_time_constant.is_finite() && self.servo_time_constant >= 0.0) {
            return Err(("servo_time_constant", "must be >= 0"));
        }
        if let Some(r) = self.servo_rate_limit {
            if !(r.is_finite() && r > 0.0) {
                return Err(("servo_rate_limit", "must be positive"));
            }
        }
        Ok(())
    }
}

fn lag_fraction(time_constant: f64, dt: f64) -> f64 {
    if time_constant > 0.0 {
        -(-dt / time_constant).exp_m1()
    } else {
        1.0
    }
}

/// Advances rotor thrusts and arm tilt toward `cmd` over one tick.
pub fn apply_actuators(
    state: &VehicleState,
    cmd: &ActuatorCommand,
    act: &ActuatorModel,
    params: &VehicleParams,
    dt: f64,
) -> VehicleState {
    let cmd = clamp_command(cmd, params);
    let mut next = *state;
    let a = lag_fraction(act.rotor_time_constant, dt);
    for (f, target) in next.rotor_thrust.iter_mut().zip(cmd.thrusts) {
        *f = if a == 1.0 { target } else { *f + (target - *f) * a };
    }
    let b = lag_fraction(act.servo_time_constant, dt);
    let mut delta = (cmd.tilt - state.tilt) * b;
    let mut slewing = false;
    if let Some(rate) = act.servo_rate_limit {
        let max_step = rate * dt;
        if delta.abs() > max_step {
            delta = max_step.copysign(delta);
            slewing = true;
        }
    }
    next.tilt = if b == 1.0 && !slewing { cmd.tilt } else { state.tilt + delta };
    next
}

/// Linear acceleration (world) and angular acceleration (body) produced by
/// the current actuator outputs, gravity and contact.
pub fn accelerations(
    state: &VehicleState,
    wp: Option<&WorkpieceModel>,
    params: &VehicleParams,
) -> (Vector3<f64>, Vector3<f64>) {
    let w = mix_forward(state.rotor_thrust, state.tilt, state.tilt, params);
    let (fc_w, tc_b) = match wp {
        Some(wp) => contact_wrench(state, wp),
        None => (Vector3::zeros(), Vector3::zeros()),
    };
    let m = params.mass();
    let gravity = Vector3::new(0.0, 0.0, -m * GRAVITY);
    let lin = (state.attitude * w.force() + gravity + fc_w) / m;
    let j = params.inertia();
    let omega = state.omega_b;
    let ang = params.inertia_inv() * (w.torque() + tc_b - omega.cross(&(j * omega)));
    (lin, ang)
}

#[derive(Clone, Copy)]
struct Rigid {
    p: Vector3<f64>,
    v: Vector3<f64>,
    q: Quaternion<f64>,
    w: Vector3<f64>,
}

impl Rigid {
    fn of(s: &VehicleState) -> Self {
        Self {
            p: s.position_w,
            v: s.velocity_w,
            q: s.attitude.into_inner(),
            w: s.omega_b,
        }
    }

    fn offset(&self, d: &Rigid, h: f64) -> Rigid {
        Rigid {
            p: self.p + d.p * h,
            v: self.v + d.v * h,
            q: self.q + d.q * h,
            w: self.w + d.w * h,
        }
    }

    fn into_state(self, template: &VehicleState) -> VehicleState {
        VehicleState {
            position_w: self.p,
            velocity_w: self.v,
            attitude: UnitQuaternion::from_quaternion(self.q),
            omega_b: self.w,
            ..*template
        }
    }
}

fn derivative(x: &Rigid, template: &VehicleState, wp: Option<&WorkpieceModel>, params: &VehicleParams) -> Rigid {
    // Stage quaternions are not unit; the rotation uses the normalised one.
    let s = x.into_state(template);
    let (a, alpha) = accelerations(&s, wp, params);
    Rigid {
        p: x.v,
        v: a,
        q: x.q * Quaternion::from_imag(x.w) * 0.5,
        w: alpha,
    }
}

/// One classical RK4 step of the rigid body with actuator outputs held.
pub fn integrate_rigid_body(
    state: &VehicleState,
    wp: Option<&WorkpieceModel>,
    params: &VehicleParams,
    dt: f64,
) -> Result<VehicleState, SimError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SimError::BadStep(dt));
    }
    let x0 = Rigid::of(state);
    let k1 = derivative(&x0, state, wp, params);
    let k2 = derivative(&x0.offset(&k1, dt / 2.0), state, wp, params);
    let k3 = derivative(&x0.offset(&k2, dt / 2.0), state, wp, params);
    let k4 = derivative(&x0.offset(&k3, dt), state, wp, params);
    let sum = Rigid {
        p: k1.p + (k2.p + k3.p) * 2.0 + k4.p,
        v: k1.v + (k2.v + k3.v) * 2.0 + k4.v,
        q: k1.q + (k2.q + k3.q) * 2.0 + k4.q,
        w: k1.w + (k2.w + k3.w) * 2.0 + k4.w,
    };
    let next = x0.offset(&sum, dt / 6.0).into_state(state);
    let speed = next.velocity_w.norm();
    if !(speed <= DIVERGENCE_SPEED) || !next.omega_b.iter().all(|v| v.is_finite()) {
        return Err(SimError::Diverged { speed });
    }
    Ok(next)
}

/// Actuators relax toward `cmd`, then the rigid body advances by `dt`.
pub fn step_dynamics(
    state: &VehicleState,
    cmd: &ActuatorCommand,
    wp: Option<&WorkpieceModel>,
    act: &ActuatorModel,
    params: &VehicleParams,
    dt: f64,
) -> Result<VehicleState, SimError> {
    let actuated = apply_actuators(state, cmd, act, params, dt);
    integrate_rigid_body(&actuated, wp, params, dt)
}

/// Kinetic (translational + rotational) plus gravitational potential energy.
pub fn mechanical_energy(state: &VehicleState, params: &VehicleParams) -> f64 {
    let m = params.mass();
    0.5 * m * state.velocity_w.norm_squared()
        + 0.5 * state.omega_b.dot(&(params.inertia() * state.omega_b))
        + m * GRAVITY * state.position_w.z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::VehicleParamsBuilder;
    use std::f64::consts::FRAC_PI_2;

    const DT: f64 = 1.0 / 300.0;

    #[test]
    fn hover_is_an_equilibrium() {
        let p = VehicleParams::default();
        let s0 = VehicleState::hover_at(Vector3::new(1.0, -2.0, 3.0), &p);
        let cmd = ActuatorCommand { thrusts: [p.hover_thrust(); 4], tilt: 0.0 };
        let mut s = s0;
        for _ in 0..1000 {
            s = step_dynamics(&s, &cmd, None, &ActuatorModel::ideal(), &p, DT).unwrap();
        }
        assert!((s.position_w - s0.position_w).norm() < 1e-9);
        assert!(s.velocity_w.norm() < 1e-9);
        assert!(s.attitude.angle_to(&s0.attitude) < 1e-9);
    }

    #[test]
    fn free_fall_one_second() {
        let p = VehicleParams::default();
        let mut s = VehicleState::hover_at(Vector3::new(0.0, 0.0, 10.0), &p);
        s.rotor_thrust = [0.0; 4];
        let cmd = ActuatorCommand { thrusts: [0.0; 4], tilt: 0.0 };
        for _ in 0..300 {
            s = step_dynamics(&s, &cmd, None, &ActuatorModel::ideal(), &p, DT).unwrap();
        }
        assert!((s.position_w.z - (10.0 - GRAVITY / 2.0)).abs() < 1e-9);
        assert!((s.velocity_w.z + GRAVITY).abs() < 1e-9);
    }

    #[test]
    fn longitudinal_thrust_at_right_angle_tilt() {
        let p = VehicleParamsBuilder { tilt_min: -2.0, tilt_max: 2.0, ..Default::default() }.build().unwrap();
        let mut s = VehicleState::hover_at(Vector3::zeros(), &p);
        s.rotor_thrust = [1.5; 4];
        s.tilt = FRAC_PI_2;
        let (a, alpha) = accelerations(&s, None, &p);
        // f_py = 6 N, m = 2 kg
        assert!((a.y - 3.0).abs() < 1e-12);
        assert!((a.z + GRAVITY).abs() < 1e-12);
        assert!(alpha.norm() < 1e-12);
    }

    #[test]
    fn rotor_lag_is_first_order() {
        let p = VehicleParams::default();
        let mut s = VehicleState::hover_at(Vector3::zeros(), &p);
        s.rotor_thrust = [0.0; 4];
        let act = ActuatorModel { rotor_time_constant: 0.03, servo_time_constant: 0.0, servo_rate_limit: None };
        let cmd = ActuatorCommand { thrusts: [10.0; 4], tilt: 0.0 };
        for _ in 0..9 {
            s = apply_actuators(&s, &cmd, &act, &p, DT);
        }
        // t = 0.03 s = one time constant
        let expected = 10.0 * (1.0 - (-1.0f64).exp());
        assert!((s.rotor_thrust[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn servo_rate_limit() {
        let p = VehicleParams::default();
        let s = VehicleState::hover_at(Vector3::zeros(), &p);
        let act = ActuatorModel::typical(&p);
        let cmd = ActuatorCommand { thrusts: [5.0; 4], tilt: 0.5 };
        let s1 = apply_actuators(&s, &cmd, &act, &p, DT);
        assert!((s1.tilt - p.tilt_rate_max() * DT).abs() < 1e-15);
        let s2 = apply_actuators(&s, &cmd, &ActuatorModel::ideal(), &p, DT);
        assert_eq!(s2.tilt, 0.5);
    }

    #[test]
    fn energy_conserved_in_ballistic_tumble() {
        let p = VehicleParams::default();
        let mut s = VehicleState::hover_at(Vector3::new(0.0, 0.0, 600.0), &p);
        s.rotor_thrust = [0.0; 4];
        s.velocity_w = Vector3::new(3.0, -1.0, 20.0);
        s.omega_b = Vector3::new(1.0, 2.0, -0.5);
        let e0 = mechanical_energy(&s, &p);
        let cmd = ActuatorCommand { thrusts: [0.0; 4], tilt: 0.0 };
        for _ in 0..3000 {
            s = step_dynamics(&s, &cmd, None, &ActuatorModel::ideal(), &p, DT).unwrap();
        }
        let e1 = mechanical_energy(&s, &p);
        assert!(((e1 - e0) / e0).abs() < 1e-6, "{e0} -> {e1}");
        assert!((s.attitude.into_inner().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergence_guard() {
        let p = VehicleParams::default();
        let mut s = VehicleState::hover_at(Vector3::zeros(), &p);
        s.velocity_w = Vector3::new(2e3, 0.0, 0.0);
        let cmd = ActuatorCommand { thrusts: [p.hover_thrust(); 4], tilt: 0.0 };
        let err = step_dynamics(&s, &cmd, None, &ActuatorModel::ideal(), &p, DT).unwrap_err();
        assert!(matches!(err, SimError::Diverged { .. }));
        assert!(matches!(
            step_dynamics(&s, &cmd, None, &ActuatorModel::ideal(), &p, 0.0),
            Err(SimError::BadStep(_))
        ));
    }
}
