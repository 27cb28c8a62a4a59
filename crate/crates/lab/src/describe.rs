//! Dry-run summary of a validated plan.

use std::fmt::Write;

use crate::config::{Plan, Stage};

// Rough flop multipliers per dense block operation of size n (n³ units).
const SVD_COST: f64 = 20.0;
const EXPM_COST: f64 = 10.0;
const LU_COST: f64 = 0.7;
// Typical evaluation count of one adaptive line integral.
const LINE_EVALUATIONS: f64 = 2e4;
// Typical Simpson nodes plus doubling steps of one converged Gram integral.
const GRAM_STEPS: f64 = 300.0;

fn cube_sum(plan: &Plan) -> f64 {
    plan.system
        .partition()
        .iter()
        .map(|b| (b.len() as f64).powi(3))
        .sum()
}

fn dyadic_grid_len(t: &[f64]) -> usize {
    let t_max = t.iter().copied().fold(0.0, f64::max);
    let dyadic = kreiss_core::grid::dyadic_up_to(t_max);
    kreiss_core::grid::merge_sorted(&dyadic, t).len()
}

/// Stage-by-stage plan with grid sizes and order-of-magnitude flop counts.
pub fn describe(plan: &Plan) -> String {
    let unit = cube_sum(plan);
    let partition = plan.system.partition();
    let largest = partition.iter().map(Vec::len).max().unwrap_or(0);
    let mut s = String::new();
    let _ = writeln!(s, "operator: {}", plan.system.label());
    let _ = writeln!(s, "dim: {}", plan.system.dim());
    let _ = writeln!(s, "blocks: {} (largest {})", partition.len(), largest);
    let _ = writeln!(s, "alpha: {}", plan.alpha);
    let _ = writeln!(s, "stages:");
    let mut total = 0.0;
    for &stage in &plan.stages {
        let (detail, flops) = match stage {
            Stage::ResolventSweep | Stage::Kreiss => {
                let points = plan.r.len() * plan.beta.len();
                let strip = plan.strip_r.as_ref().map_or(0, |r| r.len() * plan.beta.len());
                (
                    format!("{} x {} lambda grid ({points} points)", plan.r.len(), plan.beta.len()),
                    (points + strip) as f64 * SVD_COST * unit,
                )
            }
            Stage::Cesaro => (
                format!("{} times", plan.t.len()),
                2.0 * plan.t.len() as f64 * GRAM_STEPS * EXPM_COST * unit,
            ),
            Stage::VerifyTheorem => {
                let n = dyadic_grid_len(&plan.t);
                (
                    format!("{} times, Cesaro grid of {n}", plan.t.len()),
                    2.0 * n as f64 * GRAM_STEPS * EXPM_COST * unit,
                )
            }
            Stage::VerifyIdentities => {
                let lines = plan.vectors.len() as f64
                    * (1.0 + plan.cesaro_t.len() as f64 + 4.0 * plan.lemma_r.len() as f64);
                (
                    format!(
                        "{} vectors, plancherel r = {}, {} Cesaro times, {} L2 radii",
                        plan.vectors.len(),
                        plan.plancherel_r,
                        plan.cesaro_t.len(),
                        plan.lemma_r.len()
                    ),
                    lines * LINE_EVALUATIONS * LU_COST * unit,
                )
            }
            Stage::FitGrowth => (
                format!("{} times, models {}", plan.fit_t.len(), model_names(plan)),
                plan.fit_t.len() as f64 * (EXPM_COST + SVD_COST) * unit,
            ),
            Stage::WaveDemo => {
                let t_max = plan.wave_demo.t_max;
                let strip = plan.wave_demo.grids.strip_r.len() * 241;
                let fit = ((t_max - 2.0) / 0.5) as usize + 1;
                (
                    format!("t_max = {t_max}, two directions"),
                    2.0 * (strip as f64 * SVD_COST + 12.0 * GRAM_STEPS * EXPM_COST
                        + fit as f64 * (EXPM_COST + SVD_COST))
                        * unit,
                )
            }
        };
        total += flops;
        let _ = writeln!(s, "  {stage}: {detail}; ~{flops:.1e} flops");
    }
    let _ = writeln!(s, "estimated total: ~{total:.1e} flops");
    s
}

fn model_names(plan: &Plan) -> String {
    plan.models
        .iter()
        .map(|m| m.name())
        .collect::<Vec<_>>()
        .join(", ")
}
