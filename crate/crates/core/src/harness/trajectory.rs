//! Piecewise-linear reference trajectories in target-frame coordinates.

use nalgebra::Vector3;

use super::scenario::Segment;
use crate::control::TrajectoryPoint;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    t0: f64,
    t1: f64,
    from: Vector3<f64>,
    to: Vector3<f64>,
}

/// Compiled trajectory. Holds its final position after the last piece.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pieces: Vec<Piece>,
}

impl Trajectory {
    /// Compiles `segments`, starting from `start` at t = 0. `contact_z` is the
    /// target-frame Z at which the end-effector touches the surface; it is
    /// only consulted by press segments.
    pub fn compile(segments: &[Segment], start: Vector3<f64>, contact_z: f64) -> Self {
        let mut pieces = Vec::new();
        let mut t = 0.0;
        let mut here = start;
        for seg in segments {
            match *seg {
                Segment::Hold { t_end, position } => {
                    pieces.push(Piece { t0: t, t1: t_end, from: position, to: position });
                    here = position;
                }
                Segment::Ramp { t_end, position } => {
                    pieces.push(Piece { t0: t, t1: t_end, from: here, to: position });
                    here = position;
                }
                Segment::Press { t_end, depth, approach_time } => {
                    let goal = Vector3::new(here.x, here.y, contact_z - depth);
                    let t_reach = t + approach_time;
                    if approach_time > 0.0 {
                        pieces.push(Piece { t0: t, t1: t_reach, from: here, to: goal });
                    }
                    if t_end > t_reach {
                        pieces.push(Piece { t0: t_reach, t1: t_end, from: goal, to: goal });
                    }
                    here = goal;
                }
            }
            t = seg.t_end();
        }
        Self { pieces }
    }

    pub fn sample(&self, t: f64) -> TrajectoryPoint {
        let idx = self.pieces.partition_point(|p| p.t1 <= t);
        match self.pieces.get(idx) {
            Some(p) if t >= p.t0 => {
                let span = p.t1 - p.t0;
                let velocity = (p.to - p.from) / span;
                TrajectoryPoint {
                    position: p.from + velocity * (t - p.t0),
                    velocity,
                    acceleration: Vector3::zeros(),
                    timestamp: t,
                }
            }
            Some(p) => TrajectoryPoint::hold(p.from, t),
            None => TrajectoryPoint::hold(self.pieces.last().map(|p| p.to).unwrap_or_default(), t),
        }
    }
}
