use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bounds::checks::{strip_kreiss_check, theorem_bound_check, BoundOutcome, StripOutcome};
use crate::bounds::fit::{growth_fit, GrowthFitResult, GrowthModel};
use crate::bounds::{CheckEntry, VerificationReport};
use crate::error::{Error, Result};
use crate::grid::{self, Grid};
use crate::linalg;
use crate::operators::{build_wave, OperatorSystem, WaveTruncationParams};
use crate::propagator::{self, TrajectorySample};

/// Shift applied to both directions of the wave group.
pub const WAVE_SHIFT: f64 = 0.5;
/// Largest accepted power exponent of `e^{-t/2}‖T_{±t}‖`.
pub const EXPONENT_GATE: f64 = 1.1;

/// Sampling grids for [`wave_proposition_demo`]. `None` selects the automatic
/// grid described on each field.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoGrids {
    /// Distances `r = -Re λ` for the strip sweep; must lie in `(0, 1)`.
    pub strip_r: Grid,
    /// Default: 241 points spanning `±(2‖Ã‖ + 5)`.
    pub strip_beta: Option<Grid>,
    /// Default: `{4, 8, …} ∩ (2, t_max]` together with `t_max`.
    pub theorem_t: Option<Grid>,
    /// Default: `2, 2.5, …, t_max`.
    pub fit_t: Option<Grid>,
}

impl Default for DemoGrids {
    fn default() -> Self {
        DemoGrids {
            strip_r: Grid::log(1e-2, 0.99, 24),
            strip_beta: None,
            theorem_t: None,
            fit_t: None,
        }
    }
}

impl DemoGrids {
    fn beta_values(&self, sys: &OperatorSystem) -> Vec<f64> {
        match &self.strip_beta {
            Some(g) => g.values(),
            None => {
                let form = sys.euclidean_blocks();
                let norm = form.map(linalg::sigma_max).into_iter().fold(0.0, f64::max);
                let half = 2.0 * norm + 5.0;
                Grid::linear(-half, half, 241).values()
            }
        }
    }

    fn theorem_values(&self, t_max: f64) -> Vec<f64> {
        match &self.theorem_t {
            Some(g) => g.values(),
            None => {
                let dyadic: Vec<f64> = grid::dyadic_up_to(t_max)
                    .into_iter()
                    .filter(|t| *t > 2.0 && *t <= t_max)
                    .collect();
                grid::merge_sorted(&dyadic, &[t_max])
            }
        }
    }

    fn fit_values(&self, t_max: f64) -> Vec<f64> {
        match &self.fit_t {
            Some(g) => g.values(),
            None => {
                let count = ((t_max - 2.0) / 0.5).floor() as usize + 1;
                let mut ts: Vec<f64> = (0..count).map(|k| 2.0 + 0.5 * k as f64).collect();
                if ts.last().is_some_and(|t| *t < t_max) {
                    ts.push(t_max);
                }
                ts
            }
        }
    }
}

/// Everything computed for one time direction of the wave group.
#[derive(Debug, Clone)]
pub struct DirectionRun {
    /// `"forward"` or `"backward"`.
    pub name: String,
    /// `±A + ½`.
    pub system: OperatorSystem,
    pub strip: Option<StripOutcome>,
    pub theorem: Option<BoundOutcome>,
    /// `e^{-t/2}‖T_{±t}‖` on the fit grid.
    pub trajectory: Vec<TrajectorySample>,
    /// Power and power-log fits of `trajectory`.
    pub fits: Vec<GrowthFitResult>,
    /// Messages of stages that failed.
    pub errors: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct WaveDemo {
    pub report: VerificationReport,
    pub forward: DirectionRun,
    pub backward: DirectionRun,
}

impl WaveDemo {
    pub fn directions(&self) -> [&DirectionRun; 2] {
        [&self.forward, &self.backward]
    }
}

/// Strip Kreiss, dyadic bound and growth fits for `e^{-|t|/2} T_{±t}` of the
/// truncated wave group. A failing stage yields a failed entry; the remaining
/// stages still run.
pub fn wave_proposition_demo(
    params: WaveTruncationParams,
    t_max: f64,
    grids: &DemoGrids,
) -> Result<WaveDemo> {
    if !(t_max >= 8.0 && t_max.is_finite()) {
        return Err(Error::config(format!("wave demo needs t_max >= 8, got {t_max}")));
    }
    grids.strip_r.validate()?;
    for g in [&grids.strip_beta, &grids.theorem_t, &grids.fit_t].into_iter().flatten() {
        g.validate()?;
    }
    let wave = build_wave(params)?;
    let forward = wave.shifted(WAVE_SHIFT);
    let backward = wave.reversed().shifted(WAVE_SHIFT);

    let mut report = VerificationReport::default();
    let forward = run_direction("forward", forward, t_max, grids, &mut report);
    let backward = run_direction("backward", backward, t_max, grids, &mut report);
    Ok(WaveDemo {
        report,
        forward,
        backward,
    })
}

fn run_direction(
    name: &str,
    system: OperatorSystem,
    t_max: f64,
    grids: &DemoGrids,
    report: &mut VerificationReport,
) -> DirectionRun {
    let mut run = DirectionRun {
        name: name.to_string(),
        system,
        strip: None,
        theorem: None,
        trajectory: Vec::new(),
        fits: Vec::new(),
        errors: Vec::new(),
    };
    let label = |check: &str| format!("{check}[{name}]");

    let strip = strip_kreiss_check(
        &run.system,
        1.0,
        &grids.strip_r.values(),
        &grids.beta_values(&run.system),
    );
    match strip {
        Ok(mut out) => {
            out.entry.check = label(&out.entry.check);
            report.push(out.entry.clone());
            run.strip = Some(out);
        }
        Err(err) => {
            report.push(CheckEntry::failed(label("strip_kreiss"), "strip Kreiss bound", &err));
            run.errors.push(err.to_string());
        }
    }

    match theorem_bound_check(&run.system, 1.0, &grids.theorem_values(t_max)) {
        Ok(mut out) => {
            out.entry.check = label(&out.entry.check);
            report.push(out.entry.clone());
            run.theorem = Some(out);
        }
        Err(err) => {
            report.push(CheckEntry::failed(label("theorem_bound"), "dyadic growth bound", &err));
            run.errors.push(err.to_string());
        }
    }

    let inequality = "power exponent of e^(-|t|/2) |T_(+-t)| <= 1.1";
    match growth_stage(&run.system, &grids.fit_values(t_max)) {
        Ok((trajectory, power, power_log, raw)) => {
            let entry = CheckEntry::from_margin(
                label("growth_exponent"),
                inequality,
                alloc::vec![power.a],
                alloc::vec![EXPONENT_GATE],
                power.a,
                EXPONENT_GATE,
            )
            .with_detail("power_a", power.a)
            .with_detail("power_c", power.c)
            .with_detail("power_rms_residual", power.rms_residual)
            .with_detail("power_log_a", power_log.a)
            .with_detail("power_log_rms_residual", power_log.rms_residual)
            .with_detail("unshifted_power_a", raw.a)
            .with_detail("t_min", power.t_min)
            .with_detail("t_max", power.t_max);
            report.push(entry);
            run.trajectory = trajectory;
            run.fits = alloc::vec![power, power_log];
        }
        Err(err) => {
            report.push(CheckEntry::failed(label("growth_exponent"), inequality, &err));
            run.errors.push(err.to_string());
        }
    }
    run
}

type GrowthStage = (Vec<TrajectorySample>, GrowthFitResult, GrowthFitResult, GrowthFitResult);

fn growth_stage(system: &OperatorSystem, ts: &[f64]) -> Result<GrowthStage> {
    let trajectory = propagator::trajectory(system, ts, &[])?;
    let power = growth_fit(&trajectory, GrowthModel::Power, None)?;
    let power_log = growth_fit(&trajectory, GrowthModel::PowerLog, None)?;
    let raw: Vec<TrajectorySample> = trajectory
        .iter()
        .map(|s| TrajectorySample {
            t: s.t,
            op_norm: s.op_norm * (WAVE_SHIFT * s.t).exp(),
            probe_norms: Vec::new(),
        })
        .collect();
    let raw = growth_fit(&raw, GrowthModel::Power, None)?;
    Ok((trajectory, power, power_log, raw))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_horizon() {
        let p = WaveTruncationParams::new(1, 1).unwrap();
        assert!(matches!(
            wave_proposition_demo(p, 4.0, &DemoGrids::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn smallest_truncation_passes() {
        let p = WaveTruncationParams::new(1, 1).unwrap();
        let demo = wave_proposition_demo(p, 8.0, &DemoGrids::default()).unwrap();
        assert_eq!(demo.report.entries.len(), 6);
        assert!(demo.report.all_pass(), "{:?}", demo.report);
        for run in demo.directions() {
            assert!(run.errors.is_empty());
            assert_eq!(run.fits.len(), 2);
            assert_eq!(run.trajectory.first().unwrap().t, 2.0);
            assert_eq!(run.trajectory.last().unwrap().t, 8.0);
        }
    }

    #[test]
    fn default_grids() {
        let g = DemoGrids::default();
        assert_eq!(g.theorem_values(30.0), alloc::vec![4.0, 8.0, 16.0, 30.0]);
        assert_eq!(g.theorem_values(8.0), alloc::vec![4.0, 8.0]);
        let fit = g.fit_values(30.0);
        assert_eq!(fit.len(), 57);
        assert_eq!(fit[56], 30.0);
    }
}
