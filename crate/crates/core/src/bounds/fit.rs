use alloc::format;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::propagator::TrajectorySample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthModel {
    /// `y = c t^a`
    Power,
    /// `y = c t^a / √(ln t)`
    PowerLog,
    /// `y = c t^a e^{ωt} / √(ln t)` with `ω` fixed by the caller.
    Shifted,
}

impl GrowthModel {
    pub fn name(&self) -> &'static str {
        match self {
            GrowthModel::Power => "power",
            GrowthModel::PowerLog => "power-log",
            GrowthModel::Shifted => "shifted",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "power" => Some(GrowthModel::Power),
            "power-log" => Some(GrowthModel::PowerLog),
            "shifted" => Some(GrowthModel::Shifted),
            _ => None,
        }
    }

    fn log_corrected(&self) -> bool {
        !matches!(self, GrowthModel::Power)
    }

    /// Model value at `t` for fitted `c`, `a` and optional `ω`.
    pub fn eval(&self, c: f64, a: f64, omega: Option<f64>, t: f64) -> f64 {
        let mut y = c * t.powf(a) * (omega.unwrap_or(0.0) * t).exp();
        if self.log_corrected() {
            y /= t.ln().sqrt();
        }
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFitResult {
    pub model: GrowthModel,
    pub c: f64,
    pub a: f64,
    pub omega: Option<f64>,
    /// RMS residual of the fit in natural-log space.
    pub rms_residual: f64,
    pub t_min: f64,
    pub t_max: f64,
}

/// Least squares of `ln y - ωt (+ ½ ln ln t)` against `(1, ln t)`.
pub fn growth_fit(
    samples: &[TrajectorySample],
    model: GrowthModel,
    omega: Option<f64>,
) -> Result<GrowthFitResult> {
    if samples.len() < 3 {
        return Err(Error::fit("growth fit needs at least 3 samples"));
    }
    if let Some(s) = samples.iter().find(|s| !(s.t >= 2.0 && s.t.is_finite())) {
        return Err(Error::fit(format!("growth fit needs t >= 2, got {}", s.t)));
    }
    if let Some(s) = samples.iter().find(|s| !(s.op_norm > 0.0 && s.op_norm.is_finite())) {
        return Err(Error::fit(format!(
            "growth fit needs positive finite norms, got {} at t = {}",
            s.op_norm, s.t
        )));
    }
    if model == GrowthModel::Shifted && omega.is_none() {
        return Err(Error::fit("the shifted model needs a fixed omega"));
    }
    if let Some(w) = omega {
        if !w.is_finite() {
            return Err(Error::fit("omega must be finite"));
        }
    }
    let w = omega.unwrap_or(0.0);
    let point = |s: &TrajectorySample| {
        let x = s.t.ln();
        let mut z = s.op_norm.ln() - w * s.t;
        if model.log_corrected() {
            z += 0.5 * x.ln();
        }
        (x, z)
    };
    let n = samples.len() as f64;
    let (sx, sz) = samples
        .iter()
        .map(point)
        .fold((0.0, 0.0), |(a, b), (x, z)| (a + x, b + z));
    let (mx, mz) = (sx / n, sz / n);
    let (mut sxx, mut sxz) = (0.0, 0.0);
    for s in samples {
        let (x, z) = point(s);
        sxx += (x - mx) * (x - mx);
        sxz += (x - mx) * (z - mz);
    }
    if !(sxx > 0.0) {
        return Err(Error::fit("degenerate design: all sample times are equal"));
    }
    let a = sxz / sxx;
    let log_c = mz - a * mx;
    let sse: f64 = samples
        .iter()
        .map(point)
        .map(|(x, z)| {
            let r = z - (log_c + a * x);
            r * r
        })
        .sum();
    Ok(GrowthFitResult {
        model,
        c: log_c.exp(),
        a,
        omega,
        rms_residual: (sse / n).sqrt(),
        t_min: samples.iter().map(|s| s.t).fold(f64::INFINITY, f64::min),
        t_max: samples.iter().map(|s| s.t).fold(f64::NEG_INFINITY, f64::max),
    })
}
