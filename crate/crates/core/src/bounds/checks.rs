use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::{E, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::bounds::CheckEntry;
use crate::error::{Error, Result};
use crate::grid;
use crate::linalg::{self, CVec};
use crate::operators::OperatorSystem;
use crate::propagator::{self, CesaroEstimate};
use crate::resolvent::{self, KreissFit, ResolventSample};

/// Slack for the resolvent-to-Cesàro inequality.
pub const CESARO_SLACK: f64 = 1.02;
/// Slack for the dyadic bound and its `α > 1` variant.
pub const BOUND_SLACK: f64 = 1.05;

/// `L = ⌊log₂ t⌋` computed by exact doubling.
pub fn dyadic_count(t: f64) -> u32 {
    let mut l = 0u32;
    while 2f64.powi(l as i32 + 1) <= t {
        l += 1;
    }
    l
}

/// Windows `[t - 2^{l+1}, t - 2^l]` for `l = 0, …, L-1`.
pub fn dyadic_windows(t: f64) -> Vec<(f64, f64)> {
    (0..dyadic_count(t) as i32)
        .map(|l| (t - 2f64.powi(l + 1), t - 2f64.powi(l)))
        .collect()
}

/// Compares `∫_ℝ ‖R(-r+iβ, A)x‖² dβ` with `2π ∫₀^∞ e^{-2rs} ‖T_s x‖² ds`.
///
/// The time integral is truncated at
/// `S = (ln(1/tol) + ln(1 + sup_{s ≤ S₀} ‖T_s‖²)) / (2r)`, `S₀ = ln(1/tol)/(2r)`.
/// Passes when the relative mismatch is at most `10·tol`.
pub fn plancherel_check(sys: &OperatorSystem, r: f64, x: &CVec, tol: f64) -> Result<CheckEntry> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::config("plancherel tolerance must lie in (0, 1)"));
    }
    let freq = resolvent::line_integral_l2(sys, r, x, tol)?;

    let log_inv = (1.0 / tol).ln();
    let s0 = log_inv / (2.0 * r);
    let probe_times: Vec<f64> = (0..=64).map(|k| s0 * k as f64 / 64.0).collect();
    let sup_sq = propagator::trajectory(sys, &probe_times, &[])?
        .iter()
        .map(|s| s.op_norm * s.op_norm)
        .fold(0.0, f64::max);
    let horizon = (log_inv + (1.0 + sup_sq).ln()) / (2.0 * r);

    let damped = sys.shifted(r);
    let form = damped.euclidean_blocks();
    let xt = sys.to_euclidean(x);
    let gram = propagator::gram_converged(
        &form,
        sys.weight(),
        horizon,
        propagator::CESARO_START_STEP.min(horizon / 4.0),
        tol,
        |blocks| propagator::quadratic_in(&form, blocks, &xt),
    )?;
    let time_side = 2.0 * PI * gram.quadratic_form(x);
    let tail = 2.0 * PI * sup_sq * sys.norm_sqr(x) * (-2.0 * r * horizon).exp() / (2.0 * r);

    let (l, rhs) = (freq.value, time_side);
    let mismatch = (l - rhs).abs() / l.abs().max(rhs.abs());
    Ok(CheckEntry::from_margin(
        "plancherel",
        "int |R(-r+ib,A)x|^2 db == 2 pi int_0^inf e^(-2rs) |T_s x|^2 ds",
        alloc::vec![l],
        alloc::vec![rhs],
        mismatch,
        10.0 * tol,
    )
    .with_detail("r", r)
    .with_detail("tol", tol)
    .with_detail("frequency_quadrature_error", freq.quadrature_error)
    .with_detail("frequency_tail_bound", freq.tail_bound)
    .with_detail("time_horizon", horizon)
    .with_detail("time_tail_estimate", tail)
    .with_detail("time_step", gram.step))
}

/// `∫₀ᵗ ‖T_s x‖² ds ≤ (e²/2π) ∫_ℝ ‖R(-1/t + iβ, A)x‖² dβ` for each `t` and
/// trial vector, plus `C' ≤ 4e² K_obs` for the observed constants.
pub fn resolvent_to_cesaro_check(
    sys: &OperatorSystem,
    alpha: f64,
    t_values: &[f64],
    vectors: &[CVec],
    tol: f64,
) -> Result<CheckEntry> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::config("alpha must be positive"));
    }
    if t_values.is_empty() {
        return Err(Error::config("resolvent-to-Cesaro check needs t values"));
    }
    if let Some(t) = t_values.iter().find(|t| !(**t > 1.0 && t.is_finite())) {
        return Err(Error::config(format!("resolvent-to-Cesaro check needs t > 1, got {t}")));
    }
    if vectors.is_empty() {
        return Err(Error::config("resolvent-to-Cesaro check needs trial vectors"));
    }
    for x in vectors {
        sys.check_vector(x)?;
    }
    let form = sys.euclidean_blocks();
    let norm_a = form.map(linalg::sigma_max).into_iter().fold(0.0, f64::max);

    let factor = E * E / (2.0 * PI);
    let (mut left, mut right) = (Vec::new(), Vec::new());
    let (mut c_obs, mut k_obs) = (0.0f64, 0.0f64);
    for &t in t_values {
        let gram = propagator::gram_integral(sys, t, propagator::CESARO_START_STEP.min(t / 4.0))?;
        let r = 1.0 / t;
        for x in vectors {
            let xx = sys.norm_sqr(x);
            let cesaro = gram.quadratic_form(x);
            let line = resolvent::line_integral_in(sys, &form, norm_a, r, x, tol)?;
            left.push(cesaro);
            right.push(factor * line.value);
            c_obs = c_obs.max(cesaro / (t.powf(2.0 * alpha) * xx));
            k_obs = k_obs.max(
                line.value * r.powf(2.0 * alpha) / ((1.0 + r.powf(alpha)).powi(2) * xx),
            );
        }
    }
    left.push(c_obs);
    right.push(4.0 * E * E * k_obs);
    Ok(CheckEntry::from_ratios(
        "resolvent_to_cesaro",
        "int_0^t |T_s x|^2 ds <= (e^2/2pi) int |R(-1/t+ib,A)x|^2 db; C' <= 4 e^2 K_obs",
        left,
        right,
        CESARO_SLACK,
    )
    .with_detail("C_prime_obs", c_obs)
    .with_detail("K_obs", k_obs)
    .with_detail("tol", tol)
    .with_note("the last left/right pair is (C'_obs, 4 e^2 K_obs)".to_string()))
}

/// Result of a growth-bound check together with the Cesàro data it used.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundOutcome {
    pub entry: CheckEntry,
    pub cesaro: CesaroEstimate,
    /// `‖T_t‖_H` at each requested `t`.
    pub norms: Vec<f64>,
}

fn bound_grid(t_values: &[f64]) -> Vec<f64> {
    let t_max = t_values.iter().copied().fold(0.0, f64::max);
    grid::merge_sorted(&grid::dyadic_up_to(t_max), t_values)
}

/// `‖T_t‖ ≤ 2 C_max t^α / √⌊log₂ t⌋` with `C_max = max(C_primal, C_adjoint)`
/// over the dyadic grid `{2, 4, …}` merged with the requested times.
pub fn theorem_bound_check(
    sys: &OperatorSystem,
    alpha: f64,
    t_values: &[f64],
) -> Result<BoundOutcome> {
    if alpha > 1.0 {
        return Err(Error::config(
            "theorem_bound_check needs alpha <= 1; use remark_alpha_check for alpha > 1",
        ));
    }
    if !(alpha > 0.0) {
        return Err(Error::config("alpha must be positive"));
    }
    if t_values.is_empty() {
        return Err(Error::config("theorem check needs t values"));
    }
    if let Some(t) = t_values.iter().find(|t| !(**t > 2.0 && t.is_finite())) {
        return Err(Error::config(format!("theorem check needs t > 2, got {t}")));
    }
    let cesaro = propagator::cesaro_constants(sys, alpha, &bound_grid(t_values))?;
    let c_max = cesaro.c_max();
    let form = sys.euclidean_blocks();
    let norms: Vec<f64> = t_values.iter().map(|&t| propagator::norm_in(&form, t)).collect();
    let bounds: Vec<f64> = t_values
        .iter()
        .map(|&t| 2.0 * c_max * t.powf(alpha) / (dyadic_count(t) as f64).sqrt())
        .collect();
    let entry = CheckEntry::from_ratios(
        "theorem_bound",
        "|T_t| <= 2 C_max t^a / sqrt(floor(log2 t))",
        norms.clone(),
        bounds,
        BOUND_SLACK,
    )
    .with_detail("alpha", alpha)
    .with_detail("C_primal", cesaro.c_primal)
    .with_detail("C_adjoint", cesaro.c_adjoint)
    .with_detail("C_max", c_max)
    .with_detail("cesaro_step", cesaro.step)
    .with_detail("cesaro_error_budget", cesaro.error_budget);
    Ok(BoundOutcome { entry, cesaro, norms })
}

/// `α > 1` variant: `‖T_t‖ ≤ 2^α √(C_adjoint C_primal) t^α`.
pub fn remark_alpha_check(
    sys: &OperatorSystem,
    alpha: f64,
    t_values: &[f64],
) -> Result<BoundOutcome> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::config(
            "remark_alpha_check needs alpha > 1; use theorem_bound_check for alpha <= 1",
        ));
    }
    if t_values.is_empty() {
        return Err(Error::config("remark check needs t values"));
    }
    if let Some(t) = t_values.iter().find(|t| !(**t > 3.0 && t.is_finite())) {
        return Err(Error::config(format!("remark check needs t > 3, got {t}")));
    }
    let cesaro = propagator::cesaro_constants(sys, alpha, &bound_grid(t_values))?;
    let form = sys.euclidean_blocks();
    let norms: Vec<f64> = t_values.iter().map(|&t| propagator::norm_in(&form, t)).collect();
    let constant = 2f64.powf(alpha) * (cesaro.c_adjoint * cesaro.c_primal).sqrt();
    let bounds: Vec<f64> = t_values.iter().map(|&t| constant * t.powf(alpha)).collect();
    let entry = CheckEntry::from_ratios(
        "remark_alpha_bound",
        "|T_t| <= 2^a sqrt(C_adjoint C_primal) t^a",
        norms.clone(),
        bounds,
        BOUND_SLACK,
    )
    .with_detail("alpha", alpha)
    .with_detail("C_primal", cesaro.c_primal)
    .with_detail("C_adjoint", cesaro.c_adjoint)
    .with_detail("cesaro_step", cesaro.step)
    .with_detail("cesaro_error_budget", cesaro.error_budget);
    Ok(BoundOutcome { entry, cesaro, norms })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripOutcome {
    pub entry: CheckEntry,
    pub samples: Vec<ResolventSample>,
    /// `None` when the grid touched the spectrum.
    pub fit: Option<KreissFit>,
}

/// Kreiss constant on the strip `-1 < Re λ < 0` only. Passes when finite.
pub fn strip_kreiss_check(
    sys: &OperatorSystem,
    alpha: f64,
    r_values: &[f64],
    beta_values: &[f64],
) -> Result<StripOutcome> {
    if let Some(r) = r_values.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(Error::config(format!("strip check needs r in (0, 1), got {r}")));
    }
    let samples = resolvent::sweep(sys, r_values, beta_values)?;
    let inequality = "|R(l,A)| <= C_strip / (-Re l)^a for -1 < Re l < 0";
    let (entry, fit) = match resolvent::kreiss_fit(&samples, alpha) {
        Ok(fit) => {
            let entry = CheckEntry::from_margin(
                "strip_kreiss",
                inequality,
                alloc::vec![fit.c_est],
                alloc::vec![f64::MAX],
                fit.c_est,
                f64::MAX,
            )
            .with_detail("alpha", alpha)
            .with_detail("C_strip", fit.c_est)
            .with_detail("argmax_re", fit.argmax_lambda.re)
            .with_detail("argmax_im", fit.argmax_lambda.im)
            .with_note("only the strip -1 < Re(lambda) < 0 was sampled".to_string());
            (entry, Some(fit))
        }
        Err(err) => (CheckEntry::failed("strip_kreiss", inequality, &err), None),
    };
    Ok(StripOutcome { entry, samples, fit })
}
