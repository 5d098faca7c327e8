//! CSV writers. Headers are fixed; error values use Rust's shortest
//! round-trip scientific format so repeated runs produce identical bytes.

use std::fs;
use std::path::Path;

use localsgd_core::experiment::{ExperimentRecord, Metric, ScheduleFamily, SpeedupPoint};
use serde::Serialize;

use crate::error::CliError;

pub const TRACE_HEADER: [&str; 3] = ["t", "mean_error", "std_error"];
pub const SUMMARY_HEADER: [&str; 5] = ["strategy", "R_effective", "final_mean", "final_std", "wall_ms"];
pub const SPEEDUP_HEADER: [&str; 5] = ["family", "N", "R_effective", "speedup", "speedup_std"];

/// Written in the speed-up columns when the method's mean error is below
/// the saturation floor and the ratio would be meaningless.
pub const SATURATED: &str = "saturated";

fn sci(x: f64) -> String {
    format!("{x:e}")
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    csv::Writer::from_path(path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// `t,mean_error,std_error` — function-value gap across replications.
pub fn write_trace(path: &Path, record: &ExperimentRecord) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(TRACE_HEADER)?;
    for p in &record.trace {
        w.write_record([p.t.to_string(), sci(p.mean), sci(p.std)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(
    path: &Path,
    rows: &[(String, ExperimentRecord)],
    metric: Metric,
) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for (name, rec) in rows {
        let s = rec.summary(metric);
        w.write_record([
            name.clone(),
            rec.rounds.to_string(),
            sci(s.mean),
            sci(s.std),
            rec.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_speedup(
    path: &Path,
    rows: &[(ScheduleFamily, SpeedupPoint)],
) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(SPEEDUP_HEADER)?;
    for (family, p) in rows {
        let fmt = |v: Option<f64>| v.map_or_else(|| SATURATED.to_string(), |x| format!("{x:?}"));
        w.write_record([
            family.to_string(),
            p.workers.to_string(),
            p.rounds.to_string(),
            fmt(p.speedup),
            fmt(p.speedup_std),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    fs::write(path, text + "\n")
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}
