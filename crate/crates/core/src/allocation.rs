//! Forward mixing and inverse allocation with both arms at a common tilt.
//!
//! Writing `a = F1 + F4`, `b = F2 + F3` (arm sums) and `d1 = F1 - F4`,
//! `d2 = F2 - F3` (arm differentials), the five efforts at α = β decouple:
//!
//! - `(f_py, f_pz) = (a + b)(sin α, cos α)` fixes α and the total thrust,
//! - `τx = (a - b) l2 cos α` splits the total between the arms,
//! - `(τy, τz)` is a 2×2 linear system in `(d1, d2)` with determinant
//!   `-2 l1 k`, independent of α.

use nalgebra::{Matrix2, Vector2};
use thiserror::Error;

use crate::params::VehicleParams;
use crate::types::{ActuatorCommand, BodyWrench5};

/// Below this |cos α| the roll torque lever vanishes.
pub const COS_SINGULAR: f64 = 1e-6;
/// |τx| treated as zero at the roll singularity, N·m.
const TAU_X_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocationError {
    #[error("requested thrust magnitude is zero")]
    ZeroThrust,
    #[error("roll torque {tau_x} N·m is unachievable with thrust horizontal (cos α = {cos_alpha:e})")]
    TiltSingularity { tau_x: f64, cos_alpha: f64 },
    #[error("wrench contains non-finite values")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationResult {
    pub command: ActuatorCommand,
    pub saturated: bool,
    /// `mix_forward(command) - requested`; exactly zero when not saturated.
    pub residual: BodyWrench5,
}

/// Body-frame efforts produced by rotor thrusts `f` with front tilt `alpha`
/// and rear tilt `beta`.
pub fn mix_forward(f: [f64; 4], alpha: f64, beta: f64, params: &VehicleParams) -> BodyWrench5 {
    let [f1, f2, f3, f4] = f;
    let (l1, l2, k) = (params.l1(), params.l2(), params.k());
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let front = f1 + f4;
    let rear = f2 + f3;
    BodyWrench5 {
        f_py: front * sa + rear * sb,
        f_pz: front * ca + rear * cb,
        tau_x: front * l2 * ca - rear * l2 * cb,
        tau_y: (f1 - f4) * (ca * l1 + sa * k) + (f2 - f3) * (cb * l1 - sb * k),
        tau_z: (f4 - f1) * (sa * l1 - ca * k) + (f3 - f2) * (sb * l1 + cb * k),
    }
}

/// Mixes a command at its common tilt.
pub fn mix_command(cmd: &ActuatorCommand, params: &VehicleParams) -> BodyWrench5 {
    mix_forward(cmd.thrusts, cmd.tilt, cmd.tilt, params)
}

/// Maps arm differentials `(d1, d2)` to `(τy, τz)` at common tilt `alpha`.
pub fn tilt_coupling_matrix(alpha: f64, params: &VehicleParams) -> Matrix2<f64> {
    let (l1, k) = (params.l1(), params.k());
    let (s, c) = alpha.sin_cos();
    Matrix2::new(
        c * l1 + s * k,
        c * l1 - s * k,
        -(s * l1 - c * k),
        -(s * l1 + c * k),
    )
}

/// Solves for the four rotor thrusts and the common tilt producing `w`.
///
/// Demands outside the actuator envelope are clamped to it and flagged; the
/// returned residual is what the clamped command misses by.
pub fn allocate(w: &BodyWrench5, params: &VehicleParams) -> Result<AllocationResult, AllocationError> {
    if !w.is_finite() {
        return Err(AllocationError::NonFinite);
    }
    let total = w.f_py.hypot(w.f_pz);
    if total == 0.0 {
        return Err(AllocationError::ZeroThrust);
    }
    let alpha = w.f_py.atan2(w.f_pz);
    let cos_alpha = alpha.cos();

    let arm_diff = if cos_alpha.abs() < COS_SINGULAR {
        if w.tau_x.abs() > TAU_X_ZERO {
            return Err(AllocationError::TiltSingularity { tau_x: w.tau_x, cos_alpha });
        }
        0.0
    } else {
        w.tau_x / (params.l2() * cos_alpha)
    };
    let front = 0.5 * (total + arm_diff);
    let rear = 0.5 * (total - arm_diff);

    let m = tilt_coupling_matrix(alpha, params);
    let det = -2.0 * params.l1() * params.k();
    let inv = Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det;
    let d = inv * Vector2::new(w.tau_y, w.tau_z);

    let thrusts = [
        0.5 * (front + d.x),
        0.5 * (rear + d.y),
        0.5 * (rear - d.y),
        0.5 * (front - d.x),
    ];
    let raw = ActuatorCommand { thrusts, tilt: alpha };
    if raw.within_limits(params) {
        return Ok(AllocationResult {
            command: raw,
            saturated: false,
            residual: BodyWrench5::default(),
        });
    }
    let command = clamp_command(&raw, params);
    Ok(AllocationResult {
        command,
        saturated: true,
        residual: mix_command(&command, params) - *w,
    })
}

/// True iff `w` allocates without error and without saturation.
pub fn achievable(w: &BodyWrench5, params: &VehicleParams) -> bool {
    matches!(allocate(w, params), Ok(r) if !r.saturated)
}

pub fn clamp_command(cmd: &ActuatorCommand, params: &VehicleParams) -> ActuatorCommand {
    ActuatorCommand {
        thrusts: cmd.thrusts.map(|f| f.clamp(params.thrust_min(), params.thrust_max())),
        tilt: cmd.tilt.clamp(params.tilt_min(), params.tilt_max()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::VehicleParamsBuilder;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn params_l(l1: f64, l2: f64, k: f64) -> VehicleParams {
        VehicleParamsBuilder { l1, l2, k, ..Default::default() }.build().unwrap()
    }

    #[test]
    fn symmetric_hover_mixes_to_pure_thrust() {
        let p = VehicleParams::default();
        let w = mix_forward([3.0; 4], 0.0, 0.0, &p);
        assert_eq!(w, BodyWrench5::new(0.0, 12.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn arm_imbalance_gives_roll_torque() {
        // τx = (6+6)(0.2) - (4+4)(0.2) = 0.8
        let p = params_l(0.15, 0.2, 0.02);
        let w = mix_forward([6.0, 4.0, 4.0, 6.0], 0.0, 0.0, &p);
        assert!((w.tau_x - 0.8).abs() < 1e-12);
        assert!((w.f_pz - 20.0).abs() < 1e-12);
        assert_eq!((w.f_py, w.tau_y, w.tau_z), (0.0, 0.0, 0.0));
    }

    #[test]
    fn differential_gives_pitch_and_yaw() {
        // τy = (6-4)(0.15) = 0.3, τz = (4-6)(0 - 0.02) = 0.04
        let p = params_l(0.15, 0.2, 0.02);
        let w = mix_forward([6.0, 5.0, 5.0, 4.0], 0.0, 0.0, &p);
        assert!((w.tau_y - 0.3).abs() < 1e-12);
        assert!((w.tau_z - 0.04).abs() < 1e-12);
    }

    #[test]
    fn hover_split() {
        let p = VehicleParams::default();
        let r = allocate(&BodyWrench5::new(0.0, 19.62, 0.0, 0.0, 0.0), &p).unwrap();
        assert!(!r.saturated);
        assert_eq!(r.command.tilt, 0.0);
        for f in r.command.thrusts {
            assert!((f - 4.905).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_longitudinal_thrust_splits_evenly() {
        let p = VehicleParamsBuilder {
            tilt_min: -2.0,
            tilt_max: 2.0,
            ..Default::default()
        }
        .build()
        .unwrap();
        let r = allocate(&BodyWrench5::new(10.0, 0.0, 0.0, 0.0, 0.0), &p).unwrap();
        assert_eq!(r.command.tilt, FRAC_PI_2);
        for f in r.command.thrusts {
            assert!((f - 2.5).abs() < 1e-12);
        }
        assert!(!r.saturated);
    }

    #[test]
    fn roll_torque_at_horizontal_thrust_is_an_error() {
        let p = VehicleParams::default();
        let err = allocate(&BodyWrench5::new(10.0, 0.0, 0.5, 0.0, 0.0), &p).unwrap_err();
        assert!(matches!(err, AllocationError::TiltSingularity { .. }));
    }

    #[test]
    fn zero_and_non_finite() {
        let p = VehicleParams::default();
        assert_eq!(allocate(&BodyWrench5::default(), &p), Err(AllocationError::ZeroThrust));
        assert_eq!(
            allocate(&BodyWrench5::new(0.0, f64::NAN, 0.0, 0.0, 0.0), &p),
            Err(AllocationError::NonFinite)
        );
        assert!(!achievable(&BodyWrench5::default(), &p));
    }

    #[test]
    fn over_thrust_is_not_achievable() {
        let p = VehicleParams::default();
        let w = mix_forward([p.thrust_max(), 8.0, 6.0, 7.0], 0.2, 0.2, &p);
        assert!(achievable(&w, &p));
        assert!(!achievable(&(w * 1.1), &p));
        let r = allocate(&(w * 1.1), &p).unwrap();
        assert!(r.saturated);
        assert_eq!(r.command.thrusts[0], p.thrust_max());
    }

    #[test]
    fn negative_demand_is_clamped_and_flagged() {
        let p = VehicleParams::default();
        // Large yaw torque at low thrust forces two rotors negative.
        let w = BodyWrench5::new(0.0, 4.0, 0.0, 0.0, 1.0);
        let r = allocate(&w, &p).unwrap();
        assert!(r.saturated);
        assert!(r.command.thrusts.iter().all(|&f| f >= p.thrust_min()));
        assert!(r.command.thrusts.iter().any(|&f| f == p.thrust_min()));
        assert_eq!(r.residual, mix_command(&r.command, &p) - w);
        assert!(r.residual.tau_z.abs() > 0.0);
    }

    #[test]
    fn tilt_beyond_limits_is_clamped() {
        let p = VehicleParams::default();
        let w = BodyWrench5::new(10.0, 1.0, 0.0, 0.0, 0.0);
        let r = allocate(&w, &p).unwrap();
        assert!(r.saturated);
        assert_eq!(r.command.tilt, p.tilt_max());
    }

    fn arb_params() -> impl Strategy<Value = VehicleParams> {
        (0.05..0.5f64, 0.05..0.5f64, 0.002..0.1f64).prop_map(|(l1, l2, k)| params_l(l1, l2, k))
    }

    proptest! {
        #[test]
        fn round_trip_inside_envelope(
            p in arb_params(),
            f in prop::array::uniform4(0.5..14.5f64),
            tilt in -1.0..1.0f64,
        ) {
            let w = mix_forward(f, tilt, tilt, &p);
            let r = allocate(&w, &p).unwrap();
            prop_assert!(!r.saturated);
            let back = mix_command(&r.command, &p);
            for (x, y) in back.as_array().iter().zip(w.as_array()) {
                prop_assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0));
            }
            for (x, y) in r.command.thrusts.iter().zip(f) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn negating_lateral_force_mirrors_tilt(
            fy in -20.0..20.0f64, fz in 0.1..40.0f64,
        ) {
            let p = VehicleParams::default();
            let a = allocate(&BodyWrench5::new(fy, fz, 0.0, 0.0, 0.0), &p).unwrap();
            let b = allocate(&BodyWrench5::new(-fy, fz, 0.0, 0.0, 0.0), &p).unwrap();
            let (sa, sb): (f64, f64) = (a.command.thrusts.iter().sum(), b.command.thrusts.iter().sum());
            if !a.saturated && !b.saturated {
                prop_assert_eq!(a.command.tilt, -b.command.tilt);
                prop_assert!((sa - sb).abs() < 1e-12 * sa.max(1.0));
            }
        }

        #[test]
        fn clamped_commands_stay_in_bounds(w in prop::array::uniform5(-50.0..50.0f64)) {
            let p = VehicleParams::default();
            let w = BodyWrench5::from_array(w);
            if let Ok(r) = allocate(&w, &p) {
                prop_assert!(r.command.within_limits(&p));
                if r.saturated {
                    prop_assert_eq!(r.residual, mix_command(&r.command, &p) - w);
                } else {
                    prop_assert_eq!(r.residual, BodyWrench5::default());
                }
            }
        }
    }
}
