//! Path CSV files with header `j,t,x` (and optionally `b`, the driving fBm).

use std::io::{Read, Write};

use crate::error::{HurstError, Result};
use crate::fbm::SamplePath;

/// Relative tolerance on the spacing of the `t` column.
pub const GRID_TOLERANCE: f64 = 1e-9;

fn csv_error(e: csv::Error) -> HurstError {
    HurstError::Input(format!("csv: {e}"))
}

/// Write `j,t,x` rows, plus a `b` column when `driver` is given.
pub fn write_path_csv(path: &SamplePath, driver: Option<&SamplePath>, out: impl Write) -> Result<()> {
    if let Some(b) = driver {
        if b.m() != path.m() {
            return Err(HurstError::domain("driver and path lengths differ"));
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let header: &[&str] = if driver.is_some() {
        &["j", "t", "x", "b"]
    } else {
        &["j", "t", "x"]
    };
    w.write_record(header).map_err(csv_error)?;
    for (j, x) in path.values().iter().enumerate() {
        let mut row = vec![j.to_string(), format!("{:.16e}", path.time(j)), format!("{x:e}")];
        if let Some(b) = driver {
            row.push(format!("{:e}", b.values()[j]));
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a path whose first three columns are `j,t,x`; further columns are ignored.
///
/// `j` must count up from 0, `t` must start at 0 and be uniform within
/// [`GRID_TOLERANCE`] of the horizon; the horizon is the last `t`.
pub fn read_path_csv(input: impl Read) -> Result<SamplePath> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?.clone();
    if header.len() < 3 || &header[0] != "j" || &header[1] != "t" || &header[2] != "x" {
        return Err(HurstError::Input(format!(
            "expected header starting with j,t,x, got {:?}",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (row, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let field = |i: usize| -> Result<&str> {
            record
                .get(i)
                .ok_or_else(|| HurstError::Input(format!("row {row}: missing column {i}")))
        };
        let j: usize = field(0)?
            .trim()
            .parse()
            .map_err(|e| HurstError::Input(format!("row {row}: bad j: {e}")))?;
        if j != row {
            return Err(HurstError::Input(format!("row {row}: j = {j} out of sequence")));
        }
        let parse = |i: usize, name: &str| -> Result<f64> {
            let v: f64 = field(i)?
                .trim()
                .parse()
                .map_err(|e| HurstError::Input(format!("row {row}: bad {name}: {e}")))?;
            if !v.is_finite() {
                return Err(HurstError::Input(format!("row {row}: {name} is not finite")));
            }
            Ok(v)
        };
        times.push(parse(1, "t")?);
        values.push(parse(2, "x")?);
    }
    if values.len() < 2 {
        return Err(HurstError::Input("a path needs at least two rows".into()));
    }
    let m = values.len() - 1;
    let horizon = times[m];
    if !(horizon > 0.0) {
        return Err(HurstError::Input(format!("final time {horizon} must be positive")));
    }
    let tol = GRID_TOLERANCE * horizon;
    for (j, t) in times.iter().enumerate() {
        let expected = j as f64 * horizon / m as f64;
        if (t - expected).abs() > tol {
            return Err(HurstError::Input(format!(
                "t is not uniform: row {j} has t = {t}, expected {expected}"
            )));
        }
    }
    SamplePath::new(horizon, values)
}
