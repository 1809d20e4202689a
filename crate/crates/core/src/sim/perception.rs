//! Emulated target detector/tracker: fixed-cadence captures of the true
//! target frame with Gaussian pose noise, random dropouts and a fixed
//! delivery latency. Only the interface behaviour is modelled.

use std::collections::VecDeque;

use nalgebra::{Point3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::frames::TargetFrame;

/// Slack when comparing tick times against capture/delivery times, s.
const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerceptionConfig {
    /// Capture rate, Hz.
    pub rate: f64,
    /// Capture-to-delivery delay, s.
    pub latency: f64,
    /// Per-axis position noise σ, m.
    pub position_sigma: f64,
    /// Per-axis orientation noise σ (rotation vector), rad.
    pub orientation_sigma: f64,
    /// Probability a capture is lost.
    pub dropout: f64,
    /// Per-axis σ of the contact-force sensor, N.
    pub force_sigma: f64,
    pub seed: u64,
}

impl Default for PerceptionConfig {
    fn default() -> Self {
        Self {
            rate: 20.0,
            latency: 0.05,
            position_sigma: 0.0,
            orientation_sigma: 0.0,
            dropout: 0.0,
            force_sigma: 0.0,
            seed: 0,
        }
    }
}

impl PerceptionConfig {
    pub fn validate(&self) -> Result<(), (&'static str, &'static str)> {
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return Err(("rate", "must be positive"));
        }
        if !nonneg(self.latency) {
            return Err(("latency", "must be >= 0"));
        }
        if !nonneg(self.position_sigma) {
            return Err(("position_sigma", "must be >= 0"));
        }
        if !nonneg(self.orientation_sigma) {
            return Err(("orientation_sigma", "must be >= 0"));
        }
        if !(nonneg(self.dropout) && self.dropout < 1.0) {
            return Err(("dropout", "must be in [0, 1)"));
        }
        if !nonneg(self.force_sigma) {
            return Err(("force_sigma", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerceptionSample {
    /// Capture index (counts dropped captures too).
    pub id: u64,
    pub frame: TargetFrame,
    pub capture_time: f64,
    pub delivery_time: f64,
}

/// Stateful perception producer. Call [`PerceptionSource::perceive`] once per
/// simulation tick with monotone times.
#[derive(Debug, Clone)]
pub struct PerceptionSource {
    cfg: PerceptionConfig,
    rng: ChaCha8Rng,
    sensor_rng: ChaCha8Rng,
    next_capture: u64,
    in_flight: VecDeque<PerceptionSample>,
}

impl PerceptionSource {
    pub fn new(cfg: PerceptionConfig) -> Self {
        Self {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            sensor_rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_f0cc_e000_0001),
            next_capture: 0,
            in_flight: VecDeque::new(),
        }
    }

    pub fn config(&self) -> &PerceptionConfig {
        &self.cfg
    }

    fn gaussian3(rng: &mut ChaCha8Rng, sigma: f64) -> Vector3<f64> {
        let v = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        v * sigma
    }

    fn capture(&mut self, truth: &TargetFrame, t: f64) -> Option<PerceptionSample> {
        let id = self.next_capture;
        self.next_capture += 1;
        // Fixed draw order per capture keeps the stream aligned across configs.
        let dp = Self::gaussian3(&mut self.rng, self.cfg.position_sigma);
        let dr = Self::gaussian3(&mut self.rng, self.cfg.orientation_sigma);
        let dropped = self.rng.random::<f64>() < self.cfg.dropout;
        if dropped {
            return None;
        }
        let mut frame = *truth;
        if self.cfg.position_sigma > 0.0 {
            frame.origin_w = Point3::from(truth.origin_w.coords + dp);
        }
        if self.cfg.orientation_sigma > 0.0 {
            frame.rotation = Rotation3::from_scaled_axis(dr) * truth.rotation;
        }
        Some(PerceptionSample {
            id,
            frame,
            capture_time: t,
            delivery_time: t + self.cfg.latency,
        })
    }

    /// Runs any capture due at `t`, then hands over the newest sample whose
    /// delivery time has arrived (older ones arriving on the same tick are
    /// superseded).
    pub fn perceive(&mut self, truth: &TargetFrame, t: f64) -> Option<PerceptionSample> {
        while self.next_capture as f64 / self.cfg.rate <= t + TIME_EPS {
            if let Some(s) = self.capture(truth, t) {
                self.in_flight.push_back(s);
            }
        }
        let mut latest = None;
        while let Some(front) = self.in_flight.front() {
            if front.delivery_time <= t + TIME_EPS {
                latest = self.in_flight.pop_front();
            } else {
                break;
            }
        }
        latest
    }

    /// Adds sensor noise to a contact-force reading.
    pub fn measure_force(&mut self, force: &Vector3<f64>) -> Vector3<f64> {
        if self.cfg.force_sigma > 0.0 {
            force + Self::gaussian3(&mut self.sensor_rng, self.cfg.force_sigma)
        } else {
            *force
        }
    }
}
