use nalgebra::{Unit, Vector3};

use crate::types::VehicleState;

/// Planar workpiece with a unilateral Kelvin–Voigt surface, touched by an
/// end-effector tip rigidly attached to the body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkpieceModel {
    pub point_w: Vector3<f64>,
    /// Outward surface normal.
    pub normal_w: Unit<Vector3<f64>>,
    /// N/m
    pub stiffness: f64,
    /// N·s/m
    pub damping: f64,
    /// End-effector tip in body coordinates.
    pub tip_offset_b: Vector3<f64>,
}

impl WorkpieceModel {
    pub fn validate(&self) -> Result<(), (&'static str, &'static str)> {
        if !(self.stiffness.is_finite() && self.stiffness > 0.0) {
            return Err(("stiffness", "must be positive"));
        }
        if !(self.damping.is_finite() && self.damping >= 0.0) {
            return Err(("damping", "must be >= 0"));
        }
        if !self.point_w.iter().all(|v| v.is_finite()) {
            return Err(("point", "must be finite"));
        }
        if !self.tip_offset_b.iter().all(|v| v.is_finite()) {
            return Err(("tip_offset", "must be finite"));
        }
        Ok(())
    }

    fn tip(&self, state: &VehicleState) -> (Vector3<f64>, Vector3<f64>) {
        let r_w = state.attitude * self.tip_offset_b;
        let pos = state.position_w + r_w;
        let vel = state.velocity_w + state.attitude * state.omega_b.cross(&self.tip_offset_b);
        (pos, vel)
    }

    /// Penetration depth of the tip (≥ 0).
    pub fn penetration(&self, state: &VehicleState) -> f64 {
        let (tip, _) = self.tip(state);
        (-(tip - self.point_w).dot(&self.normal_w)).max(0.0)
    }
}

/// Contact force on the vehicle, world frame. Zero out of contact and never
/// adhesive: the damping term is clipped so the normal force stays ≥ 0.
pub fn contact_force(state: &VehicleState, wp: &WorkpieceModel) -> Vector3<f64> {
    let (tip, tip_vel) = wp.tip(state);
    let n = wp.normal_w.into_inner();
    let signed_distance = (tip - wp.point_w).dot(&n);
    if signed_distance >= 0.0 {
        return Vector3::zeros();
    }
    let penetration = -signed_distance;
    let penetration_rate = -tip_vel.dot(&n);
    let magnitude = (wp.stiffness * penetration + wp.damping * penetration_rate).max(0.0);
    n * magnitude
}

/// Contact force (world) and the torque it exerts about the body origin
/// (body frame).
pub fn contact_wrench(state: &VehicleState, wp: &WorkpieceModel) -> (Vector3<f64>, Vector3<f64>) {
    let f_w = contact_force(state, wp);
    if f_w == Vector3::zeros() {
        return (f_w, Vector3::zeros());
    }
    let f_b = state.attitude.inverse() * f_w;
    (f_w, wp.tip_offset_b.cross(&f_b))
}
