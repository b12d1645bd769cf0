//! Profile CSV files: header `coordinate_m,value`, one sample per row.
//! 2-D maps use `x_m,y_m,value` in grid order; full joint maps use
//! `rho1_m,rho2_m,value`.

use std::path::Path;

use crate::error::{Result, RunError};

pub const PROFILE_HEADER: [&str; 2] = ["coordinate_m", "value"];
pub const MAP_HEADER: [&str; 3] = ["x_m", "y_m", "value"];
/// Full joint maps over detector pairs.
pub const JOINT_HEADER: [&str; 3] = ["rho1_m", "rho2_m", "value"];

fn to_bytes<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string())).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn profile_bytes(coords: &[f64], values: &[f64]) -> Vec<u8> {
    to_bytes(PROFILE_HEADER, coords.iter().zip(values).map(|(x, v)| [*x, *v]))
}

pub fn map_bytes(header: [&str; 3], points: &[[f64; 2]], values: &[f64]) -> Vec<u8> {
    to_bytes(header, points.iter().zip(values).map(|(p, v)| [p[0], p[1], *v]))
}

pub fn read_profile(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != PROFILE_HEADER {
        return Err(RunError::format(path, format!("expected header {PROFILE_HEADER:?}, got {header:?}")));
    }
    let (mut xs, mut vs) = (Vec::new(), Vec::new());
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| RunError::format(path, format!("row {}: bad number in column {i}", k + 1)))
        };
        xs.push(field(0)?);
        vs.push(field(1)?);
    }
    Ok((xs, vs))
}

fn csv_error(path: &Path, e: csv::Error) -> RunError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => RunError::io(path, io),
            _ => unreachable!(),
        }
    } else {
        RunError::format(path, e.to_string())
    }
}
