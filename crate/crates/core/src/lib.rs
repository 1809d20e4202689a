//! Control and simulation for a 5-DoF tilting-rotor multirotor.
//!
//! The vehicle carries two independently tilted arms in an "H" layout, each
//! arm holding two rotors. Tilting the arms gives direct control of the
//! longitudinal body force in addition to the usual thrust and three torques.
//!
//! The crate is organised bottom-up:
//!
//! - [`frames`], [`params`] and [`types`]: shared value types (reference
//!   frames, vehicle geometry, wrenches and actuator commands).
//! - [`allocation`]: forward mixing from rotor thrusts and tilt to the five
//!   body-frame efforts, and its closed-form inverse.
//! - [`control`]: the high-level selective impedance law, attitude reference
//!   generation and the low-level PID attitude loop.
//! - [`sim`]: rigid-body plant, actuator lag, unilateral workpiece contact and
//!   a rate-limited noisy perception source.
//! - [`harness`]: scenario files, the batch runner, CSV logs and metrics.

pub mod allocation;
pub mod control;
pub mod frames;
pub mod harness;
pub mod params;
pub mod sim;
pub mod types;

pub use allocation::{achievable, allocate, mix_forward, AllocationError, AllocationResult};
pub use frames::{make_target_frame, target_to_world, world_to_target, FrameError, FrameTransform, TargetFrame};
pub use params::{ParamsError, VehicleParams};
pub use types::{ActuatorCommand, BodyWrench5, VehicleState};

/// Gravitational acceleration, m/s². World Z points up.
pub const GRAVITY: f64 = 9.81;
