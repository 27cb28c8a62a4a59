//! Semigroup propagation `T_t = exp(-tA)`, weighted operator norms, and the
//! Gram integrals `G(t) = ∫₀ᵗ T̃_sᴴ T̃_s ds` behind the Cesàro constants.
//!
//! `sup_{‖x‖=1} ∫₀ᵗ ‖T_s x‖² ds = λ_max(G(t))`, so operator-level Cesàro
//! constants come from a Hermitian eigenvalue rather than vector sampling.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, BlockForm, CMat, CVec};
use crate::operators::OperatorSystem;
use crate::par;

/// Stepped trajectories are re-exponentiated from scratch this often.
pub const REEXP_PERIOD: usize = 25;

/// Relative change in `λ_max(G)` accepted between successive step halvings.
pub const GRAM_REL_TOL: f64 = 1e-6;

/// Maximum number of step halvings in the Gram quadrature.
pub const GRAM_MAX_HALVINGS: u32 = 12;

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::config(format!(
            "time must be finite and nonnegative, got {t} (use the reversed system for negative times)"
        )));
    }
    Ok(())
}

fn scaled(m: &CMat, s: f64) -> CMat {
    m * num_complex::Complex64::from(s)
}

/// `exp(-tA)` in the original (weighted) coordinates.
pub fn expm_semigroup(sys: &OperatorSystem, t: f64) -> Result<CMat> {
    check_time(t)?;
    let form = sys.euclidean_blocks();
    let tilde = form.scatter(&form.map(|m| linalg::expm(&scaled(m, -t))));
    let d: Vec<f64> = sys.weight().iter().map(|w| w.sqrt()).collect();
    Ok(CMat::from_fn(sys.dim(), sys.dim(), |i, j| tilde[(i, j)] * (d[j] / d[i])))
}

/// `‖T_t‖_H = σ_max(D exp(-tA) D⁻¹)`.
pub fn semigroup_norm(sys: &OperatorSystem, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(norm_in(&sys.euclidean_blocks(), t))
}

pub(crate) fn norm_in(form: &BlockForm, t: f64) -> f64 {
    form.map(|m| linalg::sigma_max(&linalg::expm(&scaled(m, -t))))
        .into_iter()
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub op_norm: f64,
    /// `‖T_t x_j‖_H` for each probe vector, in probe order.
    pub probe_norms: Vec<f64>,
}

/// Norms along an increasing time grid. Consecutive samples are linked by
/// `T_{t_{k+1}} = exp(-(t_{k+1} - t_k)A) T_{t_k}`; every
/// [`REEXP_PERIOD`]-th sample is recomputed directly.
pub fn trajectory(
    sys: &OperatorSystem,
    t_grid: &[f64],
    probes: &[CVec],
) -> Result<Vec<TrajectorySample>> {
    if t_grid.is_empty() {
        return Err(Error::config("trajectory needs a nonempty time grid"));
    }
    for &t in t_grid {
        check_time(t)?;
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("trajectory time grid must be strictly increasing"));
    }
    for x in probes {
        if x.len() != sys.dim() {
            return Err(Error::config("probe length does not match the system dimension"));
        }
    }
    let form = sys.euclidean_blocks();
    let probe_parts: Vec<Vec<CVec>> = probes
        .iter()
        .map(|x| form.gather(&sys.to_euclidean(x)))
        .collect();
    let block_ids: Vec<usize> = (0..form.blocks().len()).collect();

    // Per block: (σ_max(T_t), ‖T_t x_j‖² per probe) for every t.
    let per_block = par::map(&block_ids, |&b| {
        let m = &form.blocks()[b].mat;
        let mut step_cache: Option<(u64, CMat)> = None;
        let mut current = CMat::zeros(0, 0);
        let mut out = Vec::with_capacity(t_grid.len());
        for (k, &t) in t_grid.iter().enumerate() {
            if k % REEXP_PERIOD == 0 {
                current = linalg::expm(&scaled(m, -t));
            } else {
                let dt = t - t_grid[k - 1];
                let step = match &step_cache {
                    Some((bits, e)) if *bits == dt.to_bits() => e.clone(),
                    _ => {
                        let e = linalg::expm(&scaled(m, -dt));
                        step_cache = Some((dt.to_bits(), e.clone()));
                        e
                    }
                };
                current = step * &current;
            }
            let probe_sq: Vec<f64> = probe_parts
                .iter()
                .map(|parts| linalg::vec_norm_sqr(&(&current * &parts[b])))
                .collect();
            out.push((linalg::sigma_max(&current), probe_sq));
        }
        out
    });

    Ok(t_grid
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let op_norm = per_block.iter().map(|b| b[k].0).fold(0.0, f64::max);
            let probe_norms = (0..probes.len())
                .map(|j| per_block.iter().map(|b| b[k].1[j]).sum::<f64>().sqrt())
                .collect();
            TrajectorySample {
                t,
                op_norm,
                probe_norms,
            }
        })
        .collect())
}

/// A converged Gram integral `∫₀ᵗ T̃_sᴴ T̃_s ds`, stored block by block.
#[derive(Debug, Clone)]
pub struct GramIntegral {
    form: BlockForm,
    weight: Vec<f64>,
    blocks: Vec<CMat>,
    pub t: f64,
    /// Final Simpson step.
    pub step: f64,
    pub halvings: u32,
    /// Relative change of the convergence measure at the last halving.
    pub rel_change: f64,
}

impl GramIntegral {
    pub fn lambda_max(&self) -> f64 {
        self.blocks
            .iter()
            .map(linalg::hermitian_max_eig)
            .fold(0.0, f64::max)
    }

    /// `∫₀ᵗ ‖T_s x‖²_H ds` for an H-vector `x`.
    pub fn quadratic_form(&self, x: &CVec) -> f64 {
        let xt = CVec::from_fn(x.len(), |i, _| x[i] * self.weight[i].sqrt());
        quadratic_in(&self.form, &self.blocks, &xt)
    }

    /// The Euclidean-form Gram matrix.
    pub fn matrix(&self) -> CMat {
        self.form.scatter(&self.blocks)
    }
}

pub(crate) fn quadratic_in(form: &BlockForm, blocks: &[CMat], xt: &CVec) -> f64 {
    form.gather(xt)
        .iter()
        .zip(blocks)
        .map(|(v, g)| (v.adjoint() * g * v)[(0, 0)].re)
        .sum()
}

fn lambda_max_of(blocks: &[CMat]) -> f64 {
    blocks
        .iter()
        .map(linalg::hermitian_max_eig)
        .fold(0.0, f64::max)
}

/// Composite Simpson for `∫₀ᵗ exp(-sM)ᴴ exp(-sM) ds` with `2q` steps on each of
/// `2^doublings` equal panels.
///
/// The panels after the first are obtained from
/// `G(2P) = G(P) + T_Pᴴ G(P) T_P`, which by the semigroup law reproduces the
/// same composite rule over `[0, t]`.
fn gram_block(m: &CMat, t: f64, q: usize, doublings: u32) -> CMat {
    let n = m.nrows();
    let panel = t / 2f64.powi(doublings as i32);
    let steps = 2 * q;
    let h = panel / steps as f64;
    let step = linalg::expm(&scaled(m, -h));
    let mut current = linalg::identity(n);
    let mut acc = CMat::zeros(n, n);
    for k in 0..=steps {
        if k > 0 {
            current = if k % REEXP_PERIOD == 0 {
                linalg::expm(&scaled(m, -(k as f64) * h))
            } else {
                &step * &current
            };
        }
        let w = if k == 0 || k == steps {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += current.adjoint() * &current * num_complex::Complex64::from(w);
    }
    let mut g = acc * num_complex::Complex64::from(h / 3.0);
    let mut length = panel;
    for _ in 0..doublings {
        let tp = linalg::expm(&scaled(m, -length));
        g = &g + tp.adjoint() * &g * &tp;
        length *= 2.0;
    }
    g
}

fn doublings_for(t: f64) -> u32 {
    let mut j = 0;
    while t / 2f64.powi(j as i32) > 1.0 {
        j += 1;
    }
    j
}

/// Gram integral with Simpson steps halved (starting from `h`) until
/// `measure` changes by less than `rel_tol` relative.
pub(crate) fn gram_converged(
    form: &BlockForm,
    weight: &[f64],
    t: f64,
    h: f64,
    rel_tol: f64,
    measure: impl Fn(&[CMat]) -> f64,
) -> Result<GramIntegral> {
    let doublings = doublings_for(t);
    let panel = t / 2f64.powi(doublings as i32);
    let mut q = ((panel / (2.0 * h)).ceil() as usize).max(1);
    let compute = |q: usize| form.map(|m| gram_block(m, t, q, doublings));
    let mut prev_value = measure(&compute(q));
    let mut last_change = f64::INFINITY;
    for halving in 1..=GRAM_MAX_HALVINGS {
        q *= 2;
        let next = compute(q);
        let value = measure(&next);
        let change = (value - prev_value).abs() / value.abs().max(f64::MIN_POSITIVE);
        if change < rel_tol {
            return Ok(GramIntegral {
                form: form.clone(),
                weight: weight.to_vec(),
                blocks: next,
                t,
                step: panel / (2 * q) as f64,
                halvings: halving,
                rel_change: change,
            });
        }
        prev_value = value;
        last_change = change;
    }
    Err(Error::numerical(format!(
        "Gram quadrature at t = {t} did not converge after {GRAM_MAX_HALVINGS} halvings \
         (last relative change {last_change:e}, final step {:e}, target {rel_tol:e})",
        panel / (2 * q) as f64
    )))
}

/// Converged Gram integral of `sys` on `[0, t]`, starting from step `h`.
pub fn gram_integral(sys: &OperatorSystem, t: f64, h: f64) -> Result<GramIntegral> {
    check_gram_args(t, h)?;
    gram_converged(
        &sys.euclidean_blocks(),
        sys.weight(),
        t,
        h,
        GRAM_REL_TOL,
        lambda_max_of,
    )
}

fn check_gram_args(t: f64, h: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::config("Gram integral needs t > 0"));
    }
    if !(h > 0.0 && h <= t / 4.0) {
        return Err(Error::config(format!("Gram step must satisfy 0 < h <= t/4, got h = {h}")));
    }
    Ok(())
}

/// Value of the Cesàro quotient at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramCesaro {
    pub t: f64,
    /// `λ_max(G(t)) = sup_{‖x‖=1} ∫₀ᵗ ‖T_s x‖² ds`.
    pub lambda_max: f64,
    /// `λ_max(G(t)) / t^{2α}`.
    pub c: f64,
    pub step: f64,
    pub rel_change: f64,
}

pub fn gram_cesaro(sys: &OperatorSystem, t: f64, alpha: f64, h: f64) -> Result<GramCesaro> {
    check_alpha(alpha)?;
    let g = gram_integral(sys, t, h)?;
    let lambda_max = g.lambda_max();
    Ok(GramCesaro {
        t,
        lambda_max,
        c: lambda_max / t.powf(2.0 * alpha),
        step: g.step,
        rel_change: g.rel_change,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::config(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CesaroRow {
    pub t: f64,
    pub lambda_max: f64,
    pub lambda_max_adjoint: f64,
    pub c_primal_t: f64,
    pub c_adjoint_t: f64,
}

/// Cesàro constants `C` with `∫₀ᵗ‖T_s x‖² ≤ C t^{2α}‖x‖²` (and the same for
/// the adjoint semigroup), maximized over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CesaroEstimate {
    pub alpha: f64,
    pub c_primal: f64,
    pub c_adjoint: f64,
    pub rows: Vec<CesaroRow>,
    /// Largest final Simpson step over the grid.
    pub step: f64,
    /// Largest relative change at the last halving over the grid.
    pub error_budget: f64,
}

impl CesaroEstimate {
    pub fn c_max(&self) -> f64 {
        self.c_primal.max(self.c_adjoint)
    }
}

/// Initial Simpson step used by [`cesaro_constants`].
pub const CESARO_START_STEP: f64 = 0.25;

pub fn cesaro_constants(sys: &OperatorSystem, alpha: f64, t_grid: &[f64]) -> Result<CesaroEstimate> {
    check_alpha(alpha)?;
    if t_grid.is_empty() {
        return Err(Error::config("Cesaro constants need a nonempty time grid"));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t > 1.0 && t.is_finite())) {
        return Err(Error::config(format!("Cesaro time grid must lie in (1, inf), got {t}")));
    }
    let primal = sys.euclidean_blocks();
    let adjoint = sys.adjoint().euclidean_blocks();
    let jobs: Vec<(f64, bool)> = t_grid
        .iter()
        .flat_map(|&t| [(t, false), (t, true)])
        .collect();
    let results = par::map(&jobs, |&(t, adj)| {
        let form = if adj { &adjoint } else { &primal };
        let h = CESARO_START_STEP.min(t / 4.0);
        gram_converged(form, sys.weight(), t, h, GRAM_REL_TOL, lambda_max_of)
    });

    let mut rows = Vec::with_capacity(t_grid.len());
    let (mut step, mut budget) = (0.0f64, 0.0f64);
    let mut it = results.into_iter();
    for &t in t_grid {
        let g = it.next().expect("primal result")?;
        let ga = it.next().expect("adjoint result")?;
        step = step.max(g.step).max(ga.step);
        budget = budget.max(g.rel_change).max(ga.rel_change);
        let scale = t.powf(2.0 * alpha);
        let (lp, la) = (g.lambda_max(), ga.lambda_max());
        rows.push(CesaroRow {
            t,
            lambda_max: lp,
            lambda_max_adjoint: la,
            c_primal_t: lp / scale,
            c_adjoint_t: la / scale,
        });
    }
    Ok(CesaroEstimate {
        alpha,
        c_primal: rows.iter().map(|r| r.c_primal_t).fold(0.0, f64::max),
        c_adjoint: rows.iter().map(|r| r.c_adjoint_t).fold(0.0, f64::max),
        rows,
        step,
        error_budget: budget,
    })
}
