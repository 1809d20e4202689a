//! Dual-level cascade: target-frame impedance law on top, quaternion PID
//! attitude loop underneath, both feeding the inverse allocation.

mod attitude;
mod cascade;
mod impedance;

pub use attitude::{pid_attitude, wrench_demand, AttitudeReference, PidGains, WrenchDemand};
pub use cascade::{step_cascade, CascadeOutput, ControllerConfig, ControllerState};
pub use impedance::{impedance_force, ImpedanceGains, TrajectoryPoint};

use thiserror::Error;

use crate::allocation::AllocationError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("required roll reference {roll:.4} rad exceeds bound {limit:.4} rad")]
    UnattainableAttitude { roll: f64, limit: f64 },
    #[error("non-finite force demand")]
    NonFiniteDemand,
    #[error(transparent)]
    Allocation(#[from] AllocationError),
}
