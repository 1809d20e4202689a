//! Vehicle geometry and actuator limits.
//!
//! Layout (body X lateral, Y longitudinal, Z up; rotors in the body X-Y plane):
//!
//! ```text
//!            +Y (front)
//!   R1 (-l1,+l2) ==== R4 (+l1,+l2)     front arm, tilt α
//!                  |
//!   R2 (-l1,-l2) ==== R3 (+l1,-l2)     rear arm,  tilt β
//! ```
//!
//! Each arm rotates about an axis parallel to body X, so a rotor on an arm
//! tilted by `θ` thrusts along `(0, sin θ, cos θ)`. Rotors 1 and 3 produce a
//! reaction torque of `+k·F` along their thrust axis, rotors 2 and 4 `-k·F`.

use nalgebra::Matrix3;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("mass must be positive and finite, got {0}")]
    Mass(f64),
    #[error("inertia must be symmetric")]
    InertiaAsymmetric,
    #[error("inertia must be positive definite")]
    InertiaNotPositiveDefinite,
    #[error("l1 must be positive and finite, got {0}")]
    ArmHalfSpan(f64),
    #[error("l2 must be positive and finite, got {0}")]
    AxisHalfSeparation(f64),
    #[error("counter-torque coefficient k must be positive and finite, got {0}")]
    CounterTorque(f64),
    #[error("thrust_min must be >= 0, got {0}")]
    ThrustMin(f64),
    #[error("thrust_max ({max}) must exceed thrust_min ({min})")]
    ThrustRange { min: f64, max: f64 },
    #[error("tilt_min must be negative, got {0}")]
    TiltMin(f64),
    #[error("tilt_max must be positive, got {0}")]
    TiltMax(f64),
    #[error("tilt_rate_max must be positive, got {0}")]
    TiltRate(f64),
}

impl ParamsError {
    /// Field name the error refers to, as it appears in scenario files.
    pub fn field(&self) -> &'static str {
        match self {
            ParamsError::Mass(_) => "mass",
            ParamsError::InertiaAsymmetric | ParamsError::InertiaNotPositiveDefinite => "inertia",
            ParamsError::ArmHalfSpan(_) => "l1",
            ParamsError::AxisHalfSeparation(_) => "l2",
            ParamsError::CounterTorque(_) => "k",
            ParamsError::ThrustMin(_) => "thrust_min",
            ParamsError::ThrustRange { .. } => "thrust_max",
            ParamsError::TiltMin(_) => "tilt_min",
            ParamsError::TiltMax(_) => "tilt_max",
            ParamsError::TiltRate(_) => "tilt_rate_max",
        }
    }
}

/// Validated vehicle parameters. Construct with [`VehicleParams::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    mass: f64,
    inertia: Matrix3<f64>,
    inertia_inv: Matrix3<f64>,
    l1: f64,
    l2: f64,
    k: f64,
    thrust_min: f64,
    thrust_max: f64,
    tilt_min: f64,
    tilt_max: f64,
    tilt_rate_max: f64,
}

/// Unvalidated parameter set; fields mirror [`VehicleParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParamsBuilder {
    pub mass: f64,
    pub inertia: Matrix3<f64>,
    pub l1: f64,
    pub l2: f64,
    pub k: f64,
    pub thrust_min: f64,
    pub thrust_max: f64,
    pub tilt_min: f64,
    pub tilt_max: f64,
    pub tilt_rate_max: f64,
}

impl Default for VehicleParamsBuilder {
    /// A 2 kg airframe; the numbers used throughout the bundled scenarios.
    fn default() -> Self {
        Self {
            mass: 2.0,
            inertia: Matrix3::from_diagonal(&nalgebra::Vector3::new(0.02, 0.015, 0.03)),
            l1: 0.15,
            l2: 0.2,
            k: 0.02,
            thrust_min: 0.0,
            thrust_max: 15.0,
            tilt_min: -std::f64::consts::FRAC_PI_3,
            tilt_max: std::f64::consts::FRAC_PI_3,
            tilt_rate_max: 3.0,
        }
    }
}

impl VehicleParamsBuilder {
    pub fn build(self) -> Result<VehicleParams, ParamsError> {
        VehicleParams::new(self)
    }
}

impl VehicleParams {
    pub fn new(b: VehicleParamsBuilder) -> Result<Self, ParamsError> {
        if !(b.mass.is_finite() && b.mass > 0.0) {
            return Err(ParamsError::Mass(b.mass));
        }
        let j = b.inertia;
        if !j.iter().all(|v| v.is_finite()) || (j - j.transpose()).abs().max() > 1e-12 * j.abs().max().max(1.0) {
            return Err(ParamsError::InertiaAsymmetric);
        }
        let inertia_inv = match j.cholesky() {
            Some(ch) => ch.inverse(),
            None => return Err(ParamsError::InertiaNotPositiveDefinite),
        };
        if !(b.l1.is_finite() && b.l1 > 0.0) {
            return Err(ParamsError::ArmHalfSpan(b.l1));
        }
        if !(b.l2.is_finite() && b.l2 > 0.0) {
            return Err(ParamsError::AxisHalfSeparation(b.l2));
        }
        if !(b.k.is_finite() && b.k > 0.0) {
            return Err(ParamsError::CounterTorque(b.k));
        }
        if !(b.thrust_min.is_finite() && b.thrust_min >= 0.0) {
            return Err(ParamsError::ThrustMin(b.thrust_min));
        }
        if !(b.thrust_max.is_finite() && b.thrust_max > b.thrust_min) {
            return Err(ParamsError::ThrustRange { min: b.thrust_min, max: b.thrust_max });
        }
        if !(b.tilt_min.is_finite() && b.tilt_min < 0.0) {
            return Err(ParamsError::TiltMin(b.tilt_min));
        }
        if !(b.tilt_max.is_finite() && b.tilt_max > 0.0) {
            return Err(ParamsError::TiltMax(b.tilt_max));
        }
        if !(b.tilt_rate_max.is_finite() && b.tilt_rate_max > 0.0) {
            return Err(ParamsError::TiltRate(b.tilt_rate_max));
        }
        Ok(Self {
            mass: b.mass,
            inertia: j,
            inertia_inv,
            l1: b.l1,
            l2: b.l2,
            k: b.k,
            thrust_min: b.thrust_min,
            thrust_max: b.thrust_max,
            tilt_min: b.tilt_min,
            tilt_max: b.tilt_max,
            tilt_rate_max: b.tilt_rate_max,
        })
    }

    pub fn to_builder(&self) -> VehicleParamsBuilder {
        VehicleParamsBuilder {
            mass: self.mass,
            inertia: self.inertia,
            l1: self.l1,
            l2: self.l2,
            k: self.k,
            thrust_min: self.thrust_min,
            thrust_max: self.thrust_max,
            tilt_min: self.tilt_min,
            tilt_max: self.tilt_max,
            tilt_rate_max: self.tilt_rate_max,
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn inertia(&self) -> &Matrix3<f64> {
        &self.inertia
    }
    pub fn inertia_inv(&self) -> &Matrix3<f64> {
        &self.inertia_inv
    }
    /// Half distance between the two rotors on one arm.
    pub fn l1(&self) -> f64 {
        self.l1
    }
    /// Half distance between the two tilting axes.
    pub fn l2(&self) -> f64 {
        self.l2
    }
    /// Rotor drag-to-thrust ratio, metres.
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn thrust_min(&self) -> f64 {
        self.thrust_min
    }
    pub fn thrust_max(&self) -> f64 {
        self.thrust_max
    }
    pub fn tilt_min(&self) -> f64 {
        self.tilt_min
    }
    pub fn tilt_max(&self) -> f64 {
        self.tilt_max
    }
    pub fn tilt_rate_max(&self) -> f64 {
        self.tilt_rate_max
    }

    /// Per-rotor thrust that balances gravity with the arms vertical.
    pub fn hover_thrust(&self) -> f64 {
        self.mass * crate::GRAVITY / 4.0
    }
}

impl Default for VehicleParams {
    fn default() -> Self {
        VehicleParamsBuilder::default().build().expect("default parameters are valid")
    }
}
