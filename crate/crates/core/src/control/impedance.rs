use nalgebra::Vector3;

/// Diagonal virtual damping `C` (N·s/m) and stiffness `K` (N/m) along the
/// target-frame axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedanceGains {
    pub damping: Vector3<f64>,
    pub stiffness: Vector3<f64>,
}

impl ImpedanceGains {
    pub fn new(damping: Vector3<f64>, stiffness: Vector3<f64>) -> Self {
        Self { damping, stiffness }
    }

    /// Checks the gains for use in a closed loop: non-negative, finite, and
    /// every axis restrained by at least one of damping or stiffness.
    /// Returns the offending axis index on failure.
    pub fn validate(&self) -> Result<(), (usize, &'static str)> {
        for i in 0..3 {
            let (c, k) = (self.damping[i], self.stiffness[i]);
            if !(c.is_finite() && c >= 0.0) {
                return Err((i, "damping must be finite and >= 0"));
            }
            if !(k.is_finite() && k >= 0.0) {
                return Err((i, "stiffness must be finite and >= 0"));
            }
            if c == 0.0 && k == 0.0 {
                return Err((i, "damping and stiffness are both zero"));
            }
        }
        Ok(())
    }
}

/// Desired target-frame position, velocity and acceleration at `timestamp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
    pub timestamp: f64,
}

impl TrajectoryPoint {
    pub fn hold(position: Vector3<f64>, timestamp: f64) -> Self {
        Self {
            position,
            velocity: Vector3::zeros(),
            acceleration: Vector3::zeros(),
            timestamp,
        }
    }
}

/// Target-frame thrust force demanded by the selective impedance law:
///
/// `F_p = -F_g - F_c + M·λ̈_d - C·ė - K·e`, with `e = λ - λ_d`.
///
/// `contact` is the contact-force feed-forward term. Passing zero leaves the
/// closed loop as `M·ë + C·ė + K·e = F_c`; passing the measured contact force
/// cancels it and turns the loop into a pure position servo.
pub fn impedance_force(
    lambda: &Vector3<f64>,
    lambda_dot: &Vector3<f64>,
    traj: &TrajectoryPoint,
    contact: &Vector3<f64>,
    gravity: &Vector3<f64>,
    gains: &ImpedanceGains,
    mass: f64,
) -> Vector3<f64> {
    let e = lambda - traj.position;
    let e_dot = lambda_dot - traj.velocity;
    -gravity - contact + traj.acceleration * mass
        - gains.damping.component_mul(&e_dot)
        - gains.stiffness.component_mul(&e)
}
