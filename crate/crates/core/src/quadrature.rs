//! Globally adaptive composite Simpson quadrature.
//!
//! Each panel carries a two-level Simpson estimate; the panel with the largest
//! Richardson error estimate is bisected until the summed estimate drops below
//! the requested absolute tolerance.

use alloc::collections::BinaryHeap;
use alloc::format;
use core::cmp::Ordering;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Hard cap on the number of panels.
pub const MAX_PANELS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the per-panel Richardson error estimates.
    pub error: f64,
    pub panels: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    // f at a, a + h/4, a + h/2, a + 3h/4, b
    f: [f64; 5],
    value: f64,
    error: f64,
}

impl Panel {
    fn new(a: f64, b: f64, f: [f64; 5]) -> Panel {
        let h = b - a;
        let coarse = h / 6.0 * (f[0] + 4.0 * f[2] + f[4]);
        let fine = h / 12.0 * (f[0] + 4.0 * f[1] + 2.0 * f[2] + 4.0 * f[3] + f[4]);
        let diff = fine - coarse;
        Panel {
            a,
            b,
            f,
            value: fine + diff / 15.0,
            error: diff.abs() / 15.0,
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the panels
/// delimited by the sorted `breaks`.
///
/// Fails with [`Error::Numerical`] when more than [`MAX_PANELS`] panels would
/// be needed, and propagates any error raised by `f`.
pub fn integrate<F>(mut f: F, breaks: &[f64], tol: f64) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::config("quadrature tolerance must be positive"));
    }
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("quadrature breakpoints must be strictly increasing"));
    }
    let mut evaluations = 0usize;
    let mut eval = |x: f64| -> Result<f64> {
        evaluations += 1;
        let y = f(x)?;
        if !y.is_finite() {
            return Err(Error::numerical(format!("integrand is not finite at {x}")));
        }
        Ok(y)
    };

    let mut heap = BinaryHeap::new();
    let mut f_left = eval(breaks[0])?;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = b - a;
        let f_right = eval(b)?;
        let vals = [
            f_left,
            eval(a + 0.25 * h)?,
            eval(a + 0.5 * h)?,
            eval(a + 0.75 * h)?,
            f_right,
        ];
        heap.push(Panel::new(a, b, vals));
        f_left = f_right;
    }

    let mut total_error: f64 = heap.iter().map(|p| p.error).sum();
    loop {
        if total_error <= tol {
            // Confirm against a fresh sum; the running total drifts.
            total_error = heap.iter().map(|p| p.error).sum();
            if total_error <= tol {
                break;
            }
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::numerical(format!(
                "adaptive Simpson hit the {MAX_PANELS}-panel cap with error estimate {total_error:e} > {tol:e}"
            )));
        }
        let worst = heap.pop().expect("heap is nonempty");
        let (a, b) = (worst.a, worst.b);
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            return Err(Error::numerical(format!(
                "panel [{a}, {b}] cannot be bisected further in floating point"
            )));
        }
        let q = 0.25 * (b - a);
        let left = [
            worst.f[0],
            eval(a + 0.5 * q)?,
            worst.f[1],
            eval(a + 1.5 * q)?,
            worst.f[2],
        ];
        let right = [
            worst.f[2],
            eval(m + 0.5 * q)?,
            worst.f[3],
            eval(m + 1.5 * q)?,
            worst.f[4],
        ];
        let (left, right) = (Panel::new(a, m, left), Panel::new(m, b, right));
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Sum in left-to-right order so the result does not depend on heap layout.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    Ok(Quadrature {
        value: panels.iter().map(|p| p.value).sum(),
        error: panels.iter().map(|p| p.error).sum(),
        panels: panels.len(),
        evaluations,
    })
}
