//! Summary statistics over a run log.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::log::TickRecord;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("log has no records")]
    Empty,
    #[error("window must be positive, got {0}")]
    Window(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub ticks: usize,
    pub duration: f64,
    /// Tracking RMSE per target-frame axis over the whole run, m.
    pub rmse: [f64; 3],
    pub rmse_norm: f64,
    /// Length of the trailing window used for the steady-state figures, s.
    pub window: f64,
    pub steady_rmse: [f64; 3],
    pub steady_rmse_norm: f64,
    /// Contact-force magnitude mean and standard deviation over the window, N.
    pub contact_force_mean: f64,
    pub contact_force_std: f64,
    /// Largest commanded rotor thrust, N.
    pub max_thrust: f64,
    /// Fraction of ticks whose allocation saturated.
    pub saturated_fraction: f64,
    /// Impedance-model residual norm: maximum and RMS over the run, N.
    pub residual_max: f64,
    pub residual_rms: f64,
}

fn rms_axes<'a>(records: impl Iterator<Item = &'a TickRecord>) -> ([f64; 3], f64) {
    let mut sum = [0.0; 3];
    let mut n = 0usize;
    for r in records {
        for (s, e) in sum.iter_mut().zip(r.error.iter()) {
            *s += e * e;
        }
        n += 1;
    }
    let n = n.max(1) as f64;
    let axes = sum.map(|s| (s / n).sqrt());
    (axes, (sum.iter().sum::<f64>() / n).sqrt())
}

/// Computes the run summary; steady-state figures use the records whose time
/// lies within `window` seconds of the last record.
pub fn metrics(records: &[TickRecord], window: f64) -> Result<Summary, MetricsError> {
    let (first, last) = match (records.first(), records.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(MetricsError::Empty),
    };
    if !(window > 0.0) {
        return Err(MetricsError::Window(window));
    }
    let n = records.len() as f64;
    let (rmse, rmse_norm) = rms_axes(records.iter());

    let cutoff = last.t - window;
    let steady: Vec<&TickRecord> = records.iter().filter(|r| r.t >= cutoff).collect();
    let (steady_rmse, steady_rmse_norm) = rms_axes(steady.iter().copied());
    let m = steady.len().max(1) as f64;
    let contact_force_mean = steady.iter().map(|r| r.contact_t.norm()).sum::<f64>() / m;
    let contact_force_std = (steady
        .iter()
        .map(|r| (r.contact_t.norm() - contact_force_mean).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();

    let max_thrust = records
        .iter()
        .map(|r| r.command.max_thrust())
        .fold(f64::NEG_INFINITY, f64::max);
    let saturated_fraction = records.iter().filter(|r| r.saturated).count() as f64 / n;
    let residual_max = records.iter().map(|r| r.residual.norm()).fold(0.0, f64::max);
    let residual_rms = (records.iter().map(|r| r.residual.norm_squared()).sum::<f64>() / n).sqrt();

    Ok(Summary {
        ticks: records.len(),
        duration: last.t - first.t,
        rmse,
        rmse_norm,
        window,
        steady_rmse,
        steady_rmse_norm,
        contact_force_mean,
        contact_force_std,
        max_thrust,
        saturated_fraction,
        residual_max,
        residual_rms,
    })
}
