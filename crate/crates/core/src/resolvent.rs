//! Resolvent norms `‖R(λ, A)‖ = 1/σ_min(λI - Ã)`, Kreiss-constant estimates on
//! left half-plane grids, and `L²` line integrals of the resolvent along
//! vertical lines `Re λ = -r`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::bounds::CheckEntry;
use crate::error::{Error, Result};
use crate::linalg::{self, BlockForm, CMat, CVec};
use crate::operators::OperatorSystem;
use crate::par;
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventSample {
    pub lambda: Complex64,
    /// Smallest singular value of `λI - Ã`; `0` marks a point on the spectrum.
    pub sigma_min: f64,
    /// `1/sigma_min`, or `+∞` on the spectrum.
    pub norm: f64,
}

impl ResolventSample {
    pub fn is_singular(&self) -> bool {
        !self.norm.is_finite()
    }
}

/// Extent of the grid a [`KreissFit`] was computed on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSummary {
    pub r_min: f64,
    pub r_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KreissFit {
    pub alpha: f64,
    /// `max (-Re λ)^α ‖R(λ, A)‖` over the grid.
    pub c_est: f64,
    pub argmax_lambda: Complex64,
    pub grid: GridSummary,
}

pub fn resolvent_norm(sys: &OperatorSystem, lambda: Complex64) -> Result<ResolventSample> {
    resolvent_norm_in(&sys.euclidean_blocks(), lambda)
}

pub(crate) fn resolvent_norm_in(form: &BlockForm, lambda: Complex64) -> Result<ResolventSample> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::config("lambda must be finite"));
    }
    let sigma_min = linalg::shifted_sigma_min(form, lambda)?;
    Ok(ResolventSample {
        lambda,
        sigma_min,
        norm: 1.0 / sigma_min,
    })
}

/// Samples `λ = -r + iβ` row-major (`r` outer, `β` inner). Points on the
/// spectrum are returned as singular samples rather than aborting the sweep.
pub fn sweep(
    sys: &OperatorSystem,
    r_values: &[f64],
    beta_values: &[f64],
) -> Result<Vec<ResolventSample>> {
    if r_values.is_empty() || beta_values.is_empty() {
        return Err(Error::config("resolvent sweep needs nonempty r and beta grids"));
    }
    if let Some(r) = r_values.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::config(format!("sweep r values must be positive, got {r}")));
    }
    if beta_values.iter().any(|b| !b.is_finite()) {
        return Err(Error::config("sweep beta values must be finite"));
    }
    let form = sys.euclidean_blocks();
    let points: Vec<Complex64> = r_values
        .iter()
        .flat_map(|&r| beta_values.iter().map(move |&b| Complex64::new(-r, b)))
        .collect();
    let samples = par::map(&points, |&lambda| match resolvent_norm_in(&form, lambda) {
        Ok(s) => s,
        Err(_) => ResolventSample {
            lambda,
            sigma_min: 0.0,
            norm: f64::INFINITY,
        },
    });
    Ok(samples)
}

/// Best Kreiss constant on the sampled grid for exponent `alpha`. Ties keep
/// the first sample in sweep order.
pub fn kreiss_fit(samples: &[ResolventSample], alpha: f64) -> Result<KreissFit> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::config("alpha must be positive"));
    }
    let first = samples
        .first()
        .ok_or_else(|| Error::fit("kreiss fit needs at least one sample"))?;
    if let Some(s) = samples.iter().find(|s| s.is_singular()) {
        return Err(Error::fit(format!(
            "resolvent is undefined at lambda = {} (point on the spectrum)",
            s.lambda
        )));
    }
    if let Some(s) = samples.iter().find(|s| !(s.lambda.re < 0.0)) {
        return Err(Error::fit(format!(
            "kreiss fit needs Re(lambda) < 0, got {}",
            s.lambda
        )));
    }
    let mut best = (f64::NEG_INFINITY, first.lambda);
    let mut grid = GridSummary {
        r_min: f64::INFINITY,
        r_max: f64::NEG_INFINITY,
        beta_min: f64::INFINITY,
        beta_max: f64::NEG_INFINITY,
        count: samples.len(),
    };
    for s in samples {
        let r = -s.lambda.re;
        let value = r.powf(alpha) * s.norm;
        if value > best.0 {
            best = (value, s.lambda);
        }
        grid.r_min = grid.r_min.min(r);
        grid.r_max = grid.r_max.max(r);
        grid.beta_min = grid.beta_min.min(s.lambda.im);
        grid.beta_max = grid.beta_max.max(s.lambda.im);
    }
    Ok(KreissFit {
        alpha,
        c_est: best.0,
        argmax_lambda: best.1,
        grid,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineIntegral {
    /// Quadrature value of `∫_{-B}^{B} ‖R(-r+iβ, A)x‖²_H dβ`.
    pub value: f64,
    pub quadrature_error: f64,
    /// Analytic bound on the two tails `|β| > B`.
    pub tail_bound: f64,
    /// The truncation half-width `B`.
    pub half_width: f64,
    pub panels: usize,
}

impl LineIntegral {
    pub fn error_budget(&self) -> f64 {
        self.quadrature_error + self.tail_bound
    }
}

/// `∫_ℝ ‖R(-r+iβ, A)x‖²_H dβ` by adaptive Simpson over `|β| ≤ B` with
/// `B = ‖Ã‖₂ + r + max(10, 2‖x‖²/tol)`.
///
/// The tails are bounded by `2‖x‖²/(B - ‖Ã‖₂ - r)` using
/// `‖R(λ)‖ ≤ 1/(|λ| - ‖Ã‖₂)`; that bound is reported, not added.
pub fn line_integral_l2(sys: &OperatorSystem, r: f64, x: &CVec, tol: f64) -> Result<LineIntegral> {
    let form = sys.euclidean_blocks();
    let norm_a = form.map(linalg::sigma_max).into_iter().fold(0.0, f64::max);
    line_integral_in(sys, &form, norm_a, r, x, tol)
}

pub(crate) fn line_integral_in(
    sys: &OperatorSystem,
    form: &BlockForm,
    norm_a: f64,
    r: f64,
    x: &CVec,
    tol: f64,
) -> Result<LineIntegral> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::config("line integral tolerance must be positive"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::config("line integral needs r > 0"));
    }
    sys.check_vector(x)?;
    let x_norm_sqr = sys.norm_sqr(x);
    let pieces: Vec<(usize, CVec)> = form
        .gather(&sys.to_euclidean(x))
        .into_iter()
        .enumerate()
        .filter(|(_, v)| linalg::vec_norm_sqr(v) > 0.0)
        .collect();

    let margin = 10f64.max(2.0 * x_norm_sqr / tol);
    let half_width = norm_a + r + margin;
    let tail_bound = 2.0 * x_norm_sqr / (half_width - norm_a - r);

    let integrand = |beta: f64| -> Result<f64> {
        let lambda = Complex64::new(-r, beta);
        let mut total = 0.0;
        for (b, xb) in &pieces {
            let m = &form.blocks()[*b].mat;
            let n = m.nrows();
            let shifted = CMat::from_fn(n, n, |i, j| {
                let d = if i == j { lambda } else { Complex64::new(0.0, 0.0) };
                d - m[(i, j)]
            });
            let y = shifted
                .lu()
                .solve(xb)
                .ok_or(Error::ResolventUndefined { lambda })?;
            let v = linalg::vec_norm_sqr(&y);
            if !v.is_finite() {
                return Err(Error::ResolventUndefined { lambda });
            }
            total += v;
        }
        Ok(total)
    };

    let breaks = breakpoints(norm_a, r, half_width);
    let q = quadrature::integrate(integrand, &breaks, tol)?;
    Ok(LineIntegral {
        value: q.value,
        quadrature_error: q.error,
        tail_bound,
        half_width,
        panels: q.panels,
    })
}

// Initial panels of width about r across the band |β| ≤ ‖Ã‖ + r + 1 that can
// hold spectral peaks, then geometrically growing panels out to ±B.
fn breakpoints(norm_a: f64, r: f64, half_width: f64) -> Vec<f64> {
    const MAX_INNER: usize = 1 << 16;
    let inner = (norm_a + r + 1.0).min(half_width);
    let count = ((2.0 * inner / r).ceil() as usize).clamp(2, MAX_INNER);
    let mut pts: Vec<f64> = (0..=count)
        .map(|k| -inner + 2.0 * inner * k as f64 / count as f64)
        .collect();
    let mut outer = Vec::new();
    let mut edge = inner;
    while edge < half_width {
        edge = (edge * 2.0).min(half_width);
        outer.push(edge);
    }
    pts.extend(outer.iter().copied());
    pts.extend(outer.iter().map(|v| -v));
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

/// Observed constant of the `L²` resolvent estimate
/// `∫‖R(-r+i·, A)x‖² ≤ K (1+r^α)²/r^{2α} ‖x‖²`, for the system and its adjoint.
///
/// `K_obs` is the maximum of `integral · r^{2α} / ((1+r^α)² ‖x‖²)`; the check
/// passes when `K_obs` is finite and changes by less than a factor 2 when the
/// quadrature tolerance is halved.
///
/// `c_kreiss`, when known, is recorded alongside as a detail.
pub fn lemma1_check(
    sys: &OperatorSystem,
    alpha: f64,
    c_kreiss: Option<f64>,
    r_values: &[f64],
    vectors: &[CVec],
    tol: f64,
) -> Result<CheckEntry> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::config("alpha must be positive"));
    }
    if c_kreiss.is_some_and(|c| !(c > 0.0)) {
        return Err(Error::config("kreiss constant must be positive"));
    }
    if r_values.is_empty() || r_values.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::config("lemma 1 check needs positive r values"));
    }
    if vectors.is_empty() {
        return Err(Error::config("lemma 1 check needs at least one trial vector"));
    }
    for x in vectors {
        sys.check_vector(x)?;
    }

    let adjoint = sys.adjoint();
    let systems = [sys, &adjoint];
    let mut k_obs = [0.0f64; 2];
    let mut k_half = [0.0f64; 2];
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (which, s) in systems.iter().enumerate() {
        let form = s.euclidean_blocks();
        let norm_a = form.map(linalg::sigma_max).into_iter().fold(0.0, f64::max);
        let jobs: Vec<(f64, &CVec)> = r_values
            .iter()
            .flat_map(|&r| vectors.iter().map(move |x| (r, x)))
            .collect();
        let results = par::map(&jobs, |&(r, x)| -> Result<(f64, f64, f64)> {
            let coarse = line_integral_in(s, &form, norm_a, r, x, tol)?;
            let fine = line_integral_in(s, &form, norm_a, r, x, tol / 2.0)?;
            let scale = r.powf(2.0 * alpha) / ((1.0 + r.powf(alpha)).powi(2) * s.norm_sqr(x));
            Ok((coarse.value * scale, fine.value * scale, fine.value))
        });
        for (res, (r, x)) in results.into_iter().zip(&jobs) {
            let (k_coarse, k_fine, integral) = res?;
            k_obs[which] = k_obs[which].max(k_coarse);
            k_half[which] = k_half[which].max(k_fine);
            left.push(integral);
            right.push((1.0 + r.powf(alpha)).powi(2) / r.powf(2.0 * alpha) * s.norm_sqr(x));
        }
    }

    let k = k_obs[0].max(k_obs[1]);
    let k_fine = k_half[0].max(k_half[1]);
    let variation = if k > 0.0 && k_fine > 0.0 {
        (k / k_fine).max(k_fine / k)
    } else {
        f64::INFINITY
    };
    let margin = if k.is_finite() { variation } else { f64::INFINITY };
    let entry = CheckEntry::from_margin(
        "lemma1_l2_resolvent",
        "int |R(-r+i.,A)x|^2 <= K (1+r^a)^2 / r^(2a) |x|^2 (and for A*); K_obs stable under tol/2",
        left,
        right,
        margin,
        2.0,
    )
    .with_detail("K_obs", k)
    .with_detail("K_obs_primal", k_obs[0])
    .with_detail("K_obs_adjoint", k_obs[1])
    .with_detail("K_obs_half_tol", k_fine)
    .with_detail("tol", tol)
    .with_note("margin is the ratio between K_obs at tol and tol/2".to_string());
    Ok(match c_kreiss {
        Some(c) => entry.with_detail("C_kreiss", c),
        None => entry,
    })
}
