//! Scenario files (JSON) and their validation.
//!
//! The file schema ([`ScenarioFile`]) is a plain serde mirror of the domain
//! [`Scenario`]. Loading parses the file, then validates every section and
//! reports the first violation with its dotted field path.

use std::path::Path;

use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{AttitudeReference, ControllerConfig, ImpedanceGains, PidGains};
use crate::frames::{make_target_frame, TargetFrame};
use crate::params::{VehicleParams, VehicleParamsBuilder};
use crate::sim::{ActuatorModel, PerceptionConfig, WorkpieceModel};
use crate::types::VehicleState;

pub const DEFAULT_RATE_HZ: f64 = 300.0;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },
}

impl ScenarioError {
    fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ScenarioError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Dotted field path for validation errors.
    pub fn field(&self) -> Option<&str> {
        match self {
            ScenarioError::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}

// ---- file schema -----------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub duration: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_rate")]
    pub rate_hz: f64,
    /// Final window (s) over which steady-state metrics are taken.
    #[serde(default = "default_window")]
    pub metrics_window: f64,
    pub vehicle: VehicleFile,
    pub initial: InitialFile,
    pub target: TargetFile,
    pub controller: ControllerFile,
    #[serde(default)]
    pub actuators: Option<ActuatorFile>,
    #[serde(default)]
    pub workpiece: Option<WorkpieceFile>,
    #[serde(default)]
    pub perception: PerceptionFile,
    pub trajectory: Vec<SegmentFile>,
}

fn default_rate() -> f64 {
    DEFAULT_RATE_HZ
}
fn default_window() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleFile {
    pub mass: f64,
    pub inertia: [[f64; 3]; 3],
    pub l1: f64,
    pub l2: f64,
    pub k: f64,
    pub thrust_min: f64,
    pub thrust_max: f64,
    pub tilt_min: f64,
    pub tilt_max: f64,
    pub tilt_rate_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialFile {
    pub position: [f64; 3],
    #[serde(default)]
    pub velocity: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetFile {
    pub origin: [f64; 3],
    pub normal: [f64; 3],
    pub tangent_hint: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerFile {
    pub damping: [f64; 3],
    pub stiffness: [f64; 3],
    #[serde(default)]
    pub pid: Option<PidFile>,
    #[serde(default)]
    pub yaw_ref: f64,
    #[serde(default)]
    pub pitch_ref: f64,
    #[serde(default = "default_max_roll")]
    pub max_roll: f64,
    #[serde(default)]
    pub compensate_contact: bool,
}

fn default_max_roll() -> f64 {
    std::f64::consts::FRAC_PI_4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidFile {
    pub kp: [f64; 3],
    pub ki: [f64; 3],
    pub kd: [f64; 3],
    pub integral_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorFile {
    pub rotor_time_constant: f64,
    pub servo_time_constant: f64,
    #[serde(default)]
    pub servo_rate_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkpieceFile {
    pub point: [f64; 3],
    pub normal: [f64; 3],
    pub stiffness: f64,
    pub damping: f64,
    #[serde(default)]
    pub tip_offset: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerceptionFile {
    pub rate: f64,
    pub latency: f64,
    pub position_sigma: f64,
    pub orientation_sigma: f64,
    pub dropout: f64,
    pub force_sigma: f64,
}

impl Default for PerceptionFile {
    fn default() -> Self {
        let d = PerceptionConfig::default();
        Self {
            rate: d.rate,
            latency: d.latency,
            position_sigma: d.position_sigma,
            orientation_sigma: d.orientation_sigma,
            dropout: d.dropout,
            force_sigma: d.force_sigma,
        }
    }
}

/// Trajectory segment in target-frame coordinates. Each segment runs from the
/// previous segment's `t_end` (or 0) to its own `t_end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SegmentFile {
    /// Step to `position` and hold it.
    Hold { t_end: f64, position: [f64; 3] },
    /// Move linearly from the previous position to `position`.
    Ramp { t_end: f64, position: [f64; 3] },
    /// Ramp along target Z over `approach_time` to where the end-effector tip
    /// sits `depth` below the surface, then hold.
    Press { t_end: f64, depth: f64, approach_time: f64 },
}

// ---- domain ----------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    pub origin: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub tangent_hint: Vector3<f64>,
}

impl TargetSpec {
    pub fn frame(&self) -> TargetFrame {
        make_target_frame(self.origin, self.normal, self.tangent_hint).expect("validated at load")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub yaw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Hold { t_end: f64, position: Vector3<f64> },
    Ramp { t_end: f64, position: Vector3<f64> },
    Press { t_end: f64, depth: f64, approach_time: f64 },
}

impl Segment {
    pub fn t_end(&self) -> f64 {
        match *self {
            Segment::Hold { t_end, .. } | Segment::Ramp { t_end, .. } | Segment::Press { t_end, .. } => t_end,
        }
    }
}

/// Fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub duration: f64,
    pub seed: u64,
    pub rate_hz: f64,
    pub metrics_window: f64,
    pub params: VehicleParams,
    pub initial: InitialCondition,
    pub target: TargetSpec,
    pub controller: ControllerConfig,
    pub actuators: ActuatorModel,
    pub workpiece: Option<WorkpieceModel>,
    /// Perception settings; `seed` mirrors the scenario seed.
    pub perception: PerceptionConfig,
    pub trajectory: Vec<Segment>,
}

impl Scenario {
    pub fn target_frame(&self) -> TargetFrame {
        self.target.frame()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.rate_hz
    }

    pub fn ticks(&self) -> u64 {
        (self.duration * self.rate_hz).round() as u64
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.perception.seed = seed;
        self
    }

    pub fn with_rate(mut self, rate_hz: f64) -> Result<Self, ScenarioError> {
        if !(rate_hz.is_finite() && rate_hz > 0.0) {
            return Err(ScenarioError::invalid("rate_hz", "must be positive"));
        }
        self.rate_hz = rate_hz;
        Ok(self)
    }

    pub fn initial_attitude(&self) -> UnitQuaternion<f64> {
        UnitQuaternion::from_axis_angle(&Vector3::z_axis(), self.initial.yaw)
    }

    pub fn initial_state(&self) -> VehicleState {
        VehicleState {
            position_w: self.initial.position,
            velocity_w: self.initial.velocity,
            attitude: self.initial_attitude(),
            ..VehicleState::hover_at(self.initial.position, &self.params)
        }
    }

    pub fn to_file(&self) -> ScenarioFile {
        let p = &self.params;
        let j = p.inertia();
        let c = &self.controller;
        ScenarioFile {
            name: self.name.clone(),
            duration: self.duration,
            seed: self.seed,
            rate_hz: self.rate_hz,
            metrics_window: self.metrics_window,
            vehicle: VehicleFile {
                mass: p.mass(),
                inertia: std::array::from_fn(|r| std::array::from_fn(|col| j[(r, col)])),
                l1: p.l1(),
                l2: p.l2(),
                k: p.k(),
                thrust_min: p.thrust_min(),
                thrust_max: p.thrust_max(),
                tilt_min: p.tilt_min(),
                tilt_max: p.tilt_max(),
                tilt_rate_max: p.tilt_rate_max(),
            },
            initial: InitialFile {
                position: self.initial.position.into(),
                velocity: self.initial.velocity.into(),
                yaw: self.initial.yaw,
            },
            target: TargetFile {
                origin: self.target.origin.into(),
                normal: self.target.normal.into(),
                tangent_hint: self.target.tangent_hint.into(),
            },
            controller: ControllerFile {
                damping: c.impedance.damping.into(),
                stiffness: c.impedance.stiffness.into(),
                pid: Some(PidFile {
                    kp: c.pid.kp.into(),
                    ki: c.pid.ki.into(),
                    kd: c.pid.kd.into(),
                    integral_limit: c.pid.integral_limit,
                }),
                yaw_ref: c.attitude.yaw,
                pitch_ref: c.attitude.pitch,
                max_roll: c.attitude.max_roll,
                compensate_contact: c.compensate_contact,
            },
            actuators: Some(ActuatorFile {
                rotor_time_constant: self.actuators.rotor_time_constant,
                servo_time_constant: self.actuators.servo_time_constant,
                servo_rate_limit: self.actuators.servo_rate_limit,
            }),
            workpiece: self.workpiece.map(|w| WorkpieceFile {
                point: w.point_w.into(),
                normal: w.normal_w.into_inner().into(),
                stiffness: w.stiffness,
                damping: w.damping,
                tip_offset: w.tip_offset_b.into(),
            }),
            perception: PerceptionFile {
                rate: self.perception.rate,
                latency: self.perception.latency,
                position_sigma: self.perception.position_sigma,
                orientation_sigma: self.perception.orientation_sigma,
                dropout: self.perception.dropout,
                force_sigma: self.perception.force_sigma,
            },
            trajectory: self
                .trajectory
                .iter()
                .map(|s| match *s {
                    Segment::Hold { t_end, position } => SegmentFile::Hold { t_end, position: position.into() },
                    Segment::Ramp { t_end, position } => SegmentFile::Ramp { t_end, position: position.into() },
                    Segment::Press { t_end, depth, approach_time } => SegmentFile::Press { t_end, depth, approach_time },
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scenario serialises")
    }
}

// ---- loading ---------------------------------------------------------------

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

/// Parses and validates scenario JSON.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    validate(&file)
}

fn finite3(field: &str, v: [f64; 3]) -> Result<Vector3<f64>, ScenarioError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(Vector3::from(v))
    } else {
        Err(ScenarioError::invalid(field, "components must be finite"))
    }
}

fn finite(field: &str, v: f64) -> Result<f64, ScenarioError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ScenarioError::invalid(field, "must be finite"))
    }
}

pub fn validate(f: &ScenarioFile) -> Result<Scenario, ScenarioError> {
    if f.name.is_empty() || !f.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
        return Err(ScenarioError::invalid("name", "must be non-empty and use only [A-Za-z0-9._-]"));
    }
    if !(f.duration.is_finite() && f.duration > 0.0) {
        return Err(ScenarioError::invalid("duration", "must be positive"));
    }
    if !(f.rate_hz.is_finite() && f.rate_hz > 0.0) {
        return Err(ScenarioError::invalid("rate_hz", "must be positive"));
    }
    if !(f.metrics_window.is_finite() && f.metrics_window > 0.0) {
        return Err(ScenarioError::invalid("metrics_window", "must be positive"));
    }

    let v = &f.vehicle;
    let params = VehicleParamsBuilder {
        mass: v.mass,
        inertia: Matrix3::from_fn(|r, c| v.inertia[r][c]),
        l1: v.l1,
        l2: v.l2,
        k: v.k,
        thrust_min: v.thrust_min,
        thrust_max: v.thrust_max,
        tilt_min: v.tilt_min,
        tilt_max: v.tilt_max,
        tilt_rate_max: v.tilt_rate_max,
    }
    .build()
    .map_err(|e| ScenarioError::invalid(format!("vehicle.{}", e.field()), e.to_string()))?;

    let initial = InitialCondition {
        position: finite3("initial.position", f.initial.position)?,
        velocity: finite3("initial.velocity", f.initial.velocity)?,
        yaw: finite("initial.yaw", f.initial.yaw)?,
    };

    let target = TargetSpec {
        origin: finite3("target.origin", f.target.origin)?,
        normal: finite3("target.normal", f.target.normal)?,
        tangent_hint: finite3("target.tangent_hint", f.target.tangent_hint)?,
    };
    let frame = make_target_frame(target.origin, target.normal, target.tangent_hint)
        .map_err(|e| ScenarioError::invalid("target", e.to_string()))?;

    let c = &f.controller;
    let impedance = ImpedanceGains::new(Vector3::from(c.damping), Vector3::from(c.stiffness));
    impedance.validate().map_err(|(axis, reason)| {
        let name = ["x", "y", "z"][axis];
        ScenarioError::invalid(format!("controller.impedance.{name}"), reason)
    })?;
    let pid = match &c.pid {
        Some(p) => PidGains {
            kp: Vector3::from(p.kp),
            ki: Vector3::from(p.ki),
            kd: Vector3::from(p.kd),
            integral_limit: p.integral_limit,
        },
        None => PidGains::default(),
    };
    pid.validate().map_err(|r| ScenarioError::invalid("controller.pid", r))?;
    if !(c.max_roll.is_finite() && c.max_roll > 0.0 && c.max_roll < std::f64::consts::FRAC_PI_2) {
        return Err(ScenarioError::invalid("controller.max_roll", "must be in (0, π/2)"));
    }
    let controller = ControllerConfig {
        impedance,
        pid,
        attitude: AttitudeReference {
            yaw: finite("controller.yaw_ref", c.yaw_ref)?,
            pitch: finite("controller.pitch_ref", c.pitch_ref)?,
            max_roll: c.max_roll,
        },
        compensate_contact: c.compensate_contact,
    };

    let actuators = match &f.actuators {
        Some(a) => ActuatorModel {
            rotor_time_constant: a.rotor_time_constant,
            servo_time_constant: a.servo_time_constant,
            servo_rate_limit: a.servo_rate_limit,
        },
        None => ActuatorModel::typical(&params),
    };
    actuators
        .validate()
        .map_err(|(field, reason)| ScenarioError::invalid(format!("actuators.{field}"), reason))?;

    let workpiece = match &f.workpiece {
        None => None,
        Some(w) => {
            let normal = finite3("workpiece.normal", w.normal)?;
            let n = normal.norm();
            if (n - 1.0).abs() > 1e-9 {
                return Err(ScenarioError::invalid("workpiece.normal", "must be a unit vector"));
            }
            let model = WorkpieceModel {
                point_w: finite3("workpiece.point", w.point)?,
                normal_w: nalgebra::Unit::new_unchecked(normal),
                stiffness: w.stiffness,
                damping: w.damping,
                tip_offset_b: finite3("workpiece.tip_offset", w.tip_offset)?,
            };
            model
                .validate()
                .map_err(|(field, reason)| ScenarioError::invalid(format!("workpiece.{field}"), reason))?;
            Some(model)
        }
    };

    let pf = &f.perception;
    let perception = PerceptionConfig {
        rate: pf.rate,
        latency: pf.latency,
        position_sigma: pf.position_sigma,
        orientation_sigma: pf.orientation_sigma,
        dropout: pf.dropout,
        force_sigma: pf.force_sigma,
        seed: f.seed,
    };
    perception
        .validate()
        .map_err(|(field, reason)| ScenarioError::invalid(format!("perception.{field}"), reason))?;

    if f.trajectory.is_empty() {
        return Err(ScenarioError::invalid("trajectory", "must contain at least one segment"));
    }
    let mut trajectory = Vec::with_capacity(f.trajectory.len());
    let mut t_prev = 0.0;
    for (i, seg) in f.trajectory.iter().enumerate() {
        let at = |field: &str| format!("trajectory[{i}].{field}");
        let s = match seg {
            SegmentFile::Hold { t_end, position } => Segment::Hold {
                t_end: *t_end,
                position: finite3(&at("position"), *position)?,
            },
            SegmentFile::Ramp { t_end, position } => Segment::Ramp {
                t_end: *t_end,
                position: finite3(&at("position"), *position)?,
            },
            SegmentFile::Press { t_end, depth, approach_time } => {
                let wp = workpiece
                    .as_ref()
                    .ok_or_else(|| ScenarioError::invalid(at("kind"), "press requires a workpiece"))?;
                if wp.normal_w.cross(&frame.z_axis_w()).norm() > 1e-6 || wp.normal_w.dot(&frame.z_axis_w()) < 0.0 {
                    return Err(ScenarioError::invalid(
                        at("kind"),
                        "press requires the workpiece normal to match the target normal",
                    ));
                }
                if !(depth.is_finite() && *depth >= 0.0) {
                    return Err(ScenarioError::invalid(at("depth"), "must be >= 0"));
                }
                if !(approach_time.is_finite() && *approach_time >= 0.0 && *approach_time <= t_end - t_prev) {
                    return Err(ScenarioError::invalid(at("approach_time"), "must be within the segment"));
                }
                Segment::Press {
                    t_end: *t_end,
                    depth: *depth,
                    approach_time: *approach_time,
                }
            }
        };
        let t_end = s.t_end();
        if !(t_end.is_finite() && t_end > t_prev) {
            return Err(ScenarioError::invalid(at("t_end"), "timestamps must be strictly increasing and positive"));
        }
        t_prev = t_end;
        trajectory.push(s);
    }

    Ok(Scenario {
        name: f.name.clone(),
        duration: f.duration,
        seed: f.seed,
        rate_hz: f.rate_hz,
        metrics_window: f.metrics_window,
        params,
        initial,
        target,
        controller,
        actuators,
        workpiece,
        perception,
        trajectory,
    })
}
