//! Per-tick run records and their CSV encoding.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a log
//! read back from CSV is bit-identical to the in-memory one.

use std::io::{Read, Write};

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use thiserror::Error;

use crate::types::{ActuatorCommand, VehicleState};

/// Column order of the CSV log. Changing this is a format break.
pub const CSV_COLUMNS: [&str; 45] = [
    "tick", "t",
    "pos_x", "pos_y", "pos_z",
    "vel_x", "vel_y", "vel_z",
    "att_w", "att_x", "att_y", "att_z",
    "omega_x", "omega_y", "omega_z",
    "tilt",
    "rotor_1", "rotor_2", "rotor_3", "rotor_4",
    "lambda_x", "lambda_y", "lambda_z",
    "lambda_d_x", "lambda_d_y", "lambda_d_z",
    "err_x", "err_y", "err_z",
    "fp_x", "fp_y", "fp_z",
    "fc_x", "fc_y", "fc_z",
    "cmd_1", "cmd_2", "cmd_3", "cmd_4", "cmd_tilt",
    "saturated",
    "perception_id",
    "res_x", "res_y", "res_z",
];

#[derive(Debug, Error)]
pub enum LogError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("unexpected header: expected {expected} columns in documented order")]
    Header { expected: usize },
    #[error("row {row}: column {column}: cannot parse {value:?}")]
    Field { row: usize, column: &'static str, value: String },
    #[error("row {row}: expected {expected} fields, found {found}")]
    Width { row: usize, expected: usize, found: usize },
    #[error("row {row}: tick {tick} out of sequence")]
    Sequence { row: usize, tick: u64 },
    #[error("row {row}: timestamp not increasing")]
    Timestamp { row: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for LogError {
    fn from(e: csv::Error) -> Self {
        LogError::Csv(e.to_string())
    }
}

/// One control tick. Target-frame quantities are taken against the true
/// target frame; `force_t` is the controller's demand in its held frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickRecord {
    pub tick: u64,
    pub t: f64,
    /// Plant state at the start of the tick (actuators before this tick's update).
    pub state: VehicleState,
    pub lambda: Vector3<f64>,
    pub lambda_d: Vector3<f64>,
    pub error: Vector3<f64>,
    pub force_t: Vector3<f64>,
    pub contact_t: Vector3<f64>,
    pub command: ActuatorCommand,
    pub saturated: bool,
    pub perception_id: Option<u64>,
    /// `M·ë + C·ė + K·e − F_c` from plant accelerations, N.
    pub residual: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub scenario: String,
    pub dt: f64,
    pub records: Vec<TickRecord>,
}

fn push3(row: &mut Vec<String>, v: &Vector3<f64>) {
    row.extend(v.iter().map(|x| x.to_string()));
}

impl TickRecord {
    fn to_row(&self) -> Vec<String> {
        let mut row = Vec::with_capacity(CSV_COLUMNS.len());
        row.push(self.tick.to_string());
        row.push(self.t.to_string());
        push3(&mut row, &self.state.position_w);
        push3(&mut row, &self.state.velocity_w);
        let q = self.state.attitude.into_inner();
        row.extend([q.w, q.i, q.j, q.k].iter().map(|x| x.to_string()));
        push3(&mut row, &self.state.omega_b);
        row.push(self.state.tilt.to_string());
        row.extend(self.state.rotor_thrust.iter().map(|x| x.to_string()));
        push3(&mut row, &self.lambda);
        push3(&mut row, &self.lambda_d);
        push3(&mut row, &self.error);
        push3(&mut row, &self.force_t);
        push3(&mut row, &self.contact_t);
        row.extend(self.command.thrusts.iter().map(|x| x.to_string()));
        row.push(self.command.tilt.to_string());
        row.push(u8::from(self.saturated).to_string());
        row.push(self.perception_id.map(|i| i.to_string()).unwrap_or_default());
        push3(&mut row, &self.residual);
        row
    }

    fn from_row(row: usize, rec: &csv::StringRecord) -> Result<Self, LogError> {
        if rec.len() != CSV_COLUMNS.len() {
            return Err(LogError::Width { row, expected: CSV_COLUMNS.len(), found: rec.len() });
        }
        let field = |i: usize| -> Result<f64, LogError> {
            rec[i].parse::<f64>().map_err(|_| LogError::Field {
                row,
                column: CSV_COLUMNS[i],
                value: rec[i].to_string(),
            })
        };
        let v3 = |i: usize| -> Result<Vector3<f64>, LogError> { Ok(Vector3::new(field(i)?, field(i + 1)?, field(i + 2)?)) };
        let bad = |i: usize| LogError::Field { row, column: CSV_COLUMNS[i], value: rec[i].to_string() };

        let tick = rec[0].parse::<u64>().map_err(|_| bad(0))?;
        let saturated = match &rec[40] {
            "0" => false,
            "1" => true,
            _ => return Err(bad(40)),
        };
        let perception_id = match &rec[41] {
            "" => None,
            s => Some(s.parse::<u64>().map_err(|_| bad(41))?),
        };
        let q = Quaternion::new(field(8)?, field(9)?, field(10)?, field(11)?);
        Ok(TickRecord {
            tick,
            t: field(1)?,
            state: VehicleState {
                position_w: v3(2)?,
                velocity_w: v3(5)?,
                // Stored components are already unit; keep them bit-exact.
                attitude: UnitQuaternion::new_unchecked(q),
                omega_b: v3(12)?,
                tilt: field(15)?,
                rotor_thrust: [field(16)?, field(17)?, field(18)?, field(19)?],
            },
            lambda: v3(20)?,
            lambda_d: v3(23)?,
            error: v3(26)?,
            force_t: v3(29)?,
            contact_t: v3(32)?,
            command: ActuatorCommand {
                thrusts: [field(35)?, field(36)?, field(37)?, field(38)?],
                tilt: field(39)?,
            },
            saturated,
            perception_id,
            residual: v3(42)?,
        })
    }
}

impl RunLog {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), LogError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        for r in &self.records {
            w.write_record(r.to_row())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

/// Reads tick records back from CSV, checking the header and that ticks are
/// consecutive from 0 with increasing timestamps.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<TickRecord>, LogError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.len() != CSV_COLUMNS.len() || header.iter().zip(CSV_COLUMNS).any(|(a, b)| a != b) {
        return Err(LogError::Header { expected: CSV_COLUMNS.len() });
    }
    let mut records: Vec<TickRecord> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let r = TickRecord::from_row(row, &rec?)?;
        if r.tick != i as u64 {
            return Err(LogError::Sequence { row, tick: r.tick });
        }
        if let Some(prev) = records.last() {
            if !(r.t > prev.t) {
                return Err(LogError::Timestamp { row });
            }
        }
        records.push(r);
    }
    Ok(records)
}
