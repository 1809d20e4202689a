//! Plant model: rigid-body Newton–Euler dynamics with RK4, first-order
//! actuator lag, unilateral spring-damper workpiece contact and an emulated
//! perception front end.

mod contact;
mod dynamics;
mod perception;

pub use contact::{contact_force, contact_wrench, WorkpieceModel};
pub use dynamics::{
    accelerations, apply_actuators, integrate_rigid_body, mechanical_energy, step_dynamics, ActuatorModel,
    DIVERGENCE_SPEED,
};
pub use perception::{PerceptionConfig, PerceptionSample, PerceptionSource};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("simulation diverged: speed {speed:.3e} m/s")]
    Diverged { speed: f64 },
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
}
