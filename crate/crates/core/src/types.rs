//! Vehicle state, body wrench and actuator command value types.

use nalgebra::{UnitQuaternion, Vector3};

use crate::params::VehicleParams;

/// Full plant state. `rotor_thrust` and `tilt` are the *actual* actuator
/// outputs, which lag the commanded values when actuator dynamics are on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub position_w: Vector3<f64>,
    pub velocity_w: Vector3<f64>,
    /// Body → world.
    pub attitude: UnitQuaternion<f64>,
    pub omega_b: Vector3<f64>,
    /// Common arm tilt, rad.
    pub tilt: f64,
    pub rotor_thrust: [f64; 4],
}

impl VehicleState {
    /// Level, at rest, rotors at hover thrust, arms vertical.
    pub fn hover_at(position_w: Vector3<f64>, params: &VehicleParams) -> Self {
        Self {
            position_w,
            velocity_w: Vector3::zeros(),
            attitude: UnitQuaternion::identity(),
            omega_b: Vector3::zeros(),
            tilt: 0.0,
            rotor_thrust: [params.hover_thrust(); 4],
        }
    }
}

/// The five controllable body-frame efforts. Body-frame X force is
/// structurally zero for this airframe.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyWrench5 {
    pub f_py: f64,
    pub f_pz: f64,
    pub tau_x: f64,
    pub tau_y: f64,
    pub tau_z: f64,
}

impl BodyWrench5 {
    pub fn new(f_py: f64, f_pz: f64, tau_x: f64, tau_y: f64, tau_z: f64) -> Self {
        Self { f_py, f_pz, tau_x, tau_y, tau_z }
    }

    pub fn from_parts(force_yz: (f64, f64), torque: Vector3<f64>) -> Self {
        Self::new(force_yz.0, force_yz.1, torque.x, torque.y, torque.z)
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.f_py, self.f_pz, self.tau_x, self.tau_y, self.tau_z]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }

    /// Body-frame force vector `(0, f_py, f_pz)`.
    pub fn force(&self) -> Vector3<f64> {
        Vector3::new(0.0, self.f_py, self.f_pz)
    }

    pub fn torque(&self) -> Vector3<f64> {
        Vector3::new(self.tau_x, self.tau_y, self.tau_z)
    }
}

impl std::ops::Sub for BodyWrench5 {
    type Output = BodyWrench5;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (self.as_array(), rhs.as_array());
        Self::from_array(std::array::from_fn(|i| a[i] - b[i]))
    }
}

impl std::ops::Mul<f64> for BodyWrench5 {
    type Output = BodyWrench5;
    fn mul(self, s: f64) -> Self {
        Self::from_array(self.as_array().map(|v| v * s))
    }
}

/// Rotor thrusts F1..F4 (N) and the common tilt α = β (rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorCommand {
    pub thrusts: [f64; 4],
    pub tilt: f64,
}

impl ActuatorCommand {
    pub fn within_limits(&self, params: &VehicleParams) -> bool {
        self.thrusts
            .iter()
            .all(|&f| f >= params.thrust_min() && f <= params.thrust_max())
            && self.tilt >= params.tilt_min()
            && self.tilt <= params.tilt_max()
    }

    pub fn max_thrust(&self) -> f64 {
        self.thrusts.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}
