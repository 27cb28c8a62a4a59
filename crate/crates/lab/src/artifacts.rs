//! CSV and JSON artifact writers.
//!
//! Floats use the shortest representation that parses back to the same
//! `f64`; non-finite values appear as `inf`/`NaN` in CSV and `null` in JSON.

use std::fs;
use std::path::Path;

use kreiss_core::bounds::{CheckEntry, GrowthFitResult};
use kreiss_core::propagator::{CesaroEstimate, TrajectorySample};
use kreiss_core::resolvent::ResolventSample;
use serde_json::{json, Map, Value};

use crate::Failure;

pub const RESOLVENT_CSV: &str = "resolvent.csv";
pub const TRAJECTORY_CSV: &str = "trajectory.csv";
pub const CESARO_CSV: &str = "cesaro.csv";
pub const REPORT_JSON: &str = "report.json";
pub const FIT_JSON: &str = "fit.json";

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Shortest round-trip decimal.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(row.into_iter().map(format_float))
            .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// `re,im,sigma_min,norm`, one row per sampled `λ` in sweep order.
pub fn write_resolvent(path: &Path, samples: &[ResolventSample]) -> Result<(), Failure> {
    write_csv(
        path,
        &["re", "im", "sigma_min", "norm"],
        samples
            .iter()
            .map(|s| vec![s.lambda.re, s.lambda.im, s.sigma_min, s.norm]),
    )
}

/// `t,op_norm`.
pub fn write_trajectory(path: &Path, samples: &[TrajectorySample]) -> Result<(), Failure> {
    write_csv(
        path,
        &["t", "op_norm"],
        samples.iter().map(|s| vec![s.t, s.op_norm]),
    )
}

/// `t,lambda_max,C_primal_t,C_adjoint_t`.
pub fn write_cesaro(path: &Path, estimate: &CesaroEstimate) -> Result<(), Failure> {
    write_csv(
        path,
        &["t", "lambda_max", "C_primal_t", "C_adjoint_t"],
        estimate
            .rows
            .iter()
            .map(|r| vec![r.t, r.lambda_max, r.c_primal_t, r.c_adjoint_t]),
    )
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn entry_json(entry: &CheckEntry) -> Value {
    let details: Map<String, Value> = entry
        .details
        .iter()
        .map(|(k, v)| (k.clone(), number(*v)))
        .collect();
    json!({
        "check": entry.check,
        "inequality": entry.inequality,
        "worst_margin": number(entry.worst_margin),
        "slack": number(entry.slack),
        "pass": entry.pass,
        "details": details,
        "notes": entry.notes,
    })
}

/// A growth fit tagged with the series it was fitted to.
#[derive(Debug, Clone)]
pub struct SeriesFit {
    pub series: String,
    pub fit: GrowthFitResult,
}

pub fn fit_json(fit: &SeriesFit) -> Value {
    let f = &fit.fit;
    json!({
        "series": fit.series,
        "model": f.model.name(),
        "c": number(f.c),
        "a": number(f.a),
        "omega": f.omega.map_or(Value::Null, number),
        "rms_residual": number(f.rms_residual),
        "t_min": number(f.t_min),
        "t_max": number(f.t_max),
    })
}

fn write_json(path: &Path, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Array of `{check, inequality, worst_margin, slack, pass, details, notes}`.
pub fn write_report(path: &Path, entries: &[CheckEntry]) -> Result<(), Failure> {
    write_json(path, &Value::Array(entries.iter().map(entry_json).collect()))
}

/// Array of `{series, model, c, a, omega, rms_residual, t_min, t_max}`.
pub fn write_fits(path: &Path, fits: &[SeriesFit]) -> Result<(), Failure> {
    write_json(path, &Value::Array(fits.iter().map(fit_json).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0, 1e-7, 123456789.125, 2f64.sqrt(), 5e300, -0.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(number(f64::NAN), Value::Null);
    }
}
