use nalgebra::{Rotation3, UnitQuaternion, Vector3};

use super::{ControlError, ControllerState};
use crate::frames::TargetFrame;

/// Per-axis PID gains on the body-frame attitude error (N·m/rad, N·m/(rad·s),
/// N·m·s/rad) and a symmetric clamp on the integrated error (rad·s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub kp: Vector3<f64>,
    pub ki: Vector3<f64>,
    pub kd: Vector3<f64>,
    pub integral_limit: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        Self {
            kp: Vector3::new(2.0, 2.0, 1.0),
            ki: Vector3::new(0.5, 0.5, 0.2),
            kd: Vector3::new(0.3, 0.3, 0.2),
            integral_limit: 0.2,
        }
    }
}

impl PidGains {
    pub fn validate(&self) -> Result<(), &'static str> {
        let all = self.kp.iter().chain(self.ki.iter()).chain(self.kd.iter());
        if !all.into_iter().all(|g| g.is_finite() && *g >= 0.0) {
            return Err("gains must be finite and >= 0");
        }
        if !(self.integral_limit.is_finite() && self.integral_limit > 0.0) {
            return Err("integral_limit must be positive");
        }
        Ok(())
    }
}

/// Held references for the two attitude axes the impedance law does not set.
/// Yaw is about world Z, pitch about body X; roll (about body Y) is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeReference {
    pub yaw: f64,
    pub pitch: f64,
    pub max_roll: f64,
}

impl Default for AttitudeReference {
    fn default() -> Self {
        Self {
            yaw: 0.0,
            pitch: 0.0,
            max_roll: std::f64::consts::FRAC_PI_4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrenchDemand {
    pub f_py: f64,
    pub f_pz: f64,
    /// Body → world.
    pub attitude_ref: UnitQuaternion<f64>,
    pub roll_ref: f64,
}

/// Converts a target-frame force demand into the body-frame `(f_py, f_pz)`
/// pair plus an attitude reference whose body X axis is orthogonal to the
/// demanded force.
///
/// The airframe cannot push along body X, so a lateral world demand is
/// realised by rolling about body Y. Yaw and pitch stay at their references.
pub fn wrench_demand(
    force_t: &Vector3<f64>,
    frame: &TargetFrame,
    refs: &AttitudeReference,
) -> Result<WrenchDemand, ControlError> {
    if !force_t.iter().all(|v| v.is_finite()) {
        return Err(ControlError::NonFiniteDemand);
    }
    let force_w = frame.vector_to_world(force_t);
    let base = Rotation3::from_axis_angle(&Vector3::z_axis(), refs.yaw)
        * Rotation3::from_axis_angle(&Vector3::x_axis(), refs.pitch);
    let f = base.inverse() * force_w;
    let roll = f.x.atan2(f.z);
    if roll.abs() > refs.max_roll {
        return Err(ControlError::UnattainableAttitude { roll, limit: refs.max_roll });
    }
    let reference = base * Rotation3::from_axis_angle(&Vector3::y_axis(), roll);
    let f_b = reference.inverse() * force_w;
    Ok(WrenchDemand {
        f_py: f_b.y,
        f_pz: f_b.z,
        attitude_ref: UnitQuaternion::from_rotation_matrix(&reference),
        roll_ref: roll,
    })
}

/// Body-frame rotation vector taking `attitude` onto `attitude_ref`, on the
/// short way round.
pub(crate) fn attitude_error(attitude: &UnitQuaternion<f64>, attitude_ref: &UnitQuaternion<f64>) -> Vector3<f64> {
    let q = attitude.inverse() * attitude_ref;
    let q = if q.w < 0.0 {
        UnitQuaternion::new_unchecked(-q.into_inner())
    } else {
        q
    };
    q.scaled_axis()
}

/// `τ = Kp·e + Ki·∫e − Kd·ω`, updating the clamped integrator in `state`.
pub fn pid_attitude(
    attitude: &UnitQuaternion<f64>,
    omega_b: &Vector3<f64>,
    attitude_ref: &UnitQuaternion<f64>,
    gains: &PidGains,
    state: &mut ControllerState,
    dt: f64,
) -> Vector3<f64> {
    let e = attitude_error(attitude, attitude_ref);
    let lim = gains.integral_limit;
    state.integral = (state.integral + e * dt).map(|v| v.clamp(-lim, lim));
    state.prev_error = e;
    gains.kp.component_mul(&e) + gains.ki.component_mul(&state.integral) - gains.kd.component_mul(omega_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::make_target_frame;
    use proptest::prelude::*;

    fn level_frame() -> TargetFrame {
        make_target_frame(Vector3::zeros(), Vector3::z(), Vector3::x()).unwrap()
    }

    #[test]
    fn planar_demand_needs_no_roll() {
        let d = wrench_demand(&Vector3::new(0.0, 3.0, 19.0), &level_frame(), &AttitudeReference::default()).unwrap();
        assert_eq!(d.roll_ref, 0.0);
        assert_eq!(d.attitude_ref, UnitQuaternion::identity());
        assert_eq!((d.f_py, d.f_pz), (3.0, 19.0));
    }

    #[test]
    fn hover_demand() {
        let mg = 2.0 * crate::GRAVITY;
        let d = wrench_demand(&Vector3::new(0.0, 0.0, mg), &level_frame(), &AttitudeReference::default()).unwrap();
        assert_eq!((d.f_py, d.f_pz), (0.0, mg));
    }

    #[test]
    fn lateral_demand_rotated_into_plane() {
        let mg = 19.62;
        let fw = Vector3::new(2.0, 0.0, mg);
        let d = wrench_demand(&fw, &level_frame(), &AttitudeReference::default()).unwrap();
        // Oracle: express the world demand in the referenced body frame.
        let fb = d.attitude_ref.inverse() * fw;
        assert!(fb.x.abs() < 1e-9);
        assert!((fb.y - d.f_py).abs() < 1e-12 && (fb.z - d.f_pz).abs() < 1e-12);
        assert!((d.f_pz - fw.norm()).abs() < 1e-12);
        assert!((d.roll_ref - (2.0f64 / mg).atan()).abs() < 1e-15);
    }

    #[test]
    fn excessive_roll_is_rejected() {
        let err = wrench_demand(&Vector3::new(30.0, 0.0, 10.0), &level_frame(), &AttitudeReference::default()).unwrap_err();
        assert!(matches!(err, ControlError::UnattainableAttitude { .. }));
        let err = wrench_demand(&Vector3::new(0.0, 0.0, -5.0), &level_frame(), &AttitudeReference::default()).unwrap_err();
        assert!(matches!(err, ControlError::UnattainableAttitude { .. }));
    }

    #[test]
    fn pid_zero_error() {
        let mut st = ControllerState::new(level_frame());
        let q = UnitQuaternion::from_euler_angles(0.1, -0.2, 0.3);
        let tau = pid_attitude(&q, &Vector3::zeros(), &q, &PidGains::default(), &mut st, 1.0 / 300.0);
        assert!(tau.norm() < 1e-15);
    }

    #[test]
    fn pid_proportional_roll() {
        let gains = PidGains {
            kp: Vector3::new(2.0, 0.0, 0.0),
            ki: Vector3::zeros(),
            kd: Vector3::zeros(),
            integral_limit: 1.0,
        };
        let mut st = ControllerState::new(level_frame());
        let r = UnitQuaternion::from_axis_angle(&Vector3::x_axis(), 0.1);
        let tau = pid_attitude(&UnitQuaternion::identity(), &Vector3::zeros(), &r, &gains, &mut st, 0.01);
        assert!((tau.x - 0.2).abs() < 1e-12);
        assert!(tau.y.abs() < 1e-15 && tau.z.abs() < 1e-15);
    }

    #[test]
    fn integrator_grows_linearly_then_clamps() {
        let gains = PidGains {
            kp: Vector3::zeros(),
            ki: Vector3::new(1.0, 0.0, 0.0),
            kd: Vector3::zeros(),
            integral_limit: 0.05,
        };
        let mut st = ControllerState::new(level_frame());
        let r = UnitQuaternion::from_axis_angle(&Vector3::x_axis(), 0.1);
        let dt = 0.1;
        for n in 1..=10 {
            let tau = pid_attitude(&UnitQuaternion::identity(), &Vector3::zeros(), &r, &gains, &mut st, dt);
            let expected = (0.1 * dt * n as f64).min(0.05);
            assert!((tau.x - expected).abs() < 1e-12, "step {n}: {} vs {expected}", tau.x);
        }
    }

    #[test]
    fn derivative_opposes_rate() {
        let gains = PidGains { kp: Vector3::zeros(), ki: Vector3::zeros(), kd: Vector3::repeat(0.5), integral_limit: 1.0 };
        let mut st = ControllerState::new(level_frame());
        let q = UnitQuaternion::identity();
        let tau = pid_attitude(&q, &Vector3::new(1.0, -2.0, 0.5), &q, &gains, &mut st, 0.01);
        assert_eq!(tau, Vector3::new(-0.5, 1.0, -0.25));
    }

    proptest! {
        #[test]
        fn referenced_frame_has_no_lateral_force(
            fx in -8.0..8.0f64, fy in -8.0..8.0f64, fz in 12.0..30.0f64,
            yaw in -3.0..3.0f64, pitch in -0.3..0.3f64,
        ) {
            let refs = AttitudeReference { yaw, pitch, max_roll: 1.0 };
            let fw = Vector3::new(fx, fy, fz);
            if let Ok(d) = wrench_demand(&fw, &level_frame(), &refs) {
                let fb = d.attitude_ref.inverse() * fw;
                prop_assert!(fb.x.abs() < 1e-9);
                prop_assert!(d.f_pz > 0.0);
            }
        }

        #[test]
        fn pid_output_is_bounded(
            a in prop::array::uniform3(-3.0..3.0f64),
            w in prop::array::uniform3(-10.0..10.0f64),
            steps in 1usize..200,
        ) {
            let g = PidGains::default();
            let mut st = ControllerState::new(level_frame());
            let q = UnitQuaternion::from_scaled_axis(Vector3::from(a));
            let omega = Vector3::from(w);
            let mut tau = Vector3::zeros();
            for _ in 0..steps {
                tau = pid_attitude(&q, &omega, &UnitQuaternion::identity(), &g, &mut st, 0.01);
            }
            let bound = g.kp.component_mul(&Vector3::repeat(std::f64::consts::PI))
                + g.ki * g.integral_limit
                + g.kd.component_mul(&omega.abs());
            for i in 0..3 {
                prop_assert!(st.integral[i].abs() <= g.integral_limit);
                prop_assert!(tau[i].abs() <= bound[i] + 1e-12);
            }
        }
    }
}
