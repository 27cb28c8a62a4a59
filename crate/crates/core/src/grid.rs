//! One-dimensional sample grids for `r`, `β` and `t`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    /// `count` points geometrically spaced from `min` to `max` (both included).
    Log { min: f64, max: f64, count: usize },
    /// `count` points evenly spaced from `min` to `max` (both included).
    Linear { min: f64, max: f64, count: usize },
    Values(Vec<f64>),
}

impl Grid {
    pub fn log(min: f64, max: f64, count: usize) -> Self {
        Grid::Log { min, max, count }
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        Grid::Linear { min, max, count }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Log { count, .. } | Grid::Linear { count, .. } => *count,
            Grid::Values(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Grid::Log { min, max, count } => {
                if !(min > 0.0 && max >= min && max.is_finite()) || count == 0 {
                    return Err(Error::config("log grid needs 0 < min <= max and count >= 1"));
                }
                if count == 1 && min != max {
                    return Err(Error::config("single-point log grid needs min == max"));
                }
            }
            Grid::Linear { min, max, count } => {
                if !(min.is_finite() && max.is_finite() && max >= min) || count == 0 {
                    return Err(Error::config("linear grid needs finite min <= max and count >= 1"));
                }
                if count == 1 && min != max {
                    return Err(Error::config("single-point linear grid needs min == max"));
                }
            }
            Grid::Values(ref v) => {
                if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::config("explicit grid must be nonempty and finite"));
                }
            }
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Log { min, max, count } => {
                if count == 1 {
                    return alloc::vec![min];
                }
                let (lo, hi) = (min.ln(), max.ln());
                let last = (count - 1) as f64;
                (0..count)
                    .map(|k| match k {
                        0 => min,
                        k if k == count - 1 => max,
                        k => (lo + (hi - lo) * k as f64 / last).exp(),
                    })
                    .collect()
            }
            Grid::Linear { min, max, count } => {
                if count == 1 {
                    return alloc::vec![min];
                }
                let last = (count - 1) as f64;
                (0..count)
                    .map(|k| match k {
                        k if k == count - 1 => max,
                        k => min + (max - min) * k as f64 / last,
                    })
                    .collect()
            }
            Grid::Values(ref v) => v.clone(),
        }
    }
}

/// Powers of two `2, 4, ..., 2^ceil(log2(t_max))`.
pub fn dyadic_up_to(t_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = 2.0;
    out.push(t);
    while t < t_max {
        t *= 2.0;
        out.push(t);
    }
    out
}

/// Sorted union of two grids with exact duplicates removed.
pub fn merge_sorted(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    out.sort_by(|x, y| x.total_cmp(y));
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_hits_endpoints() {
        let v = Grid::log(1e-3, 1.0, 4).values();
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], 1e-3);
        assert_eq!(v[3], 1.0);
        assert!((v[1] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn linear_grid() {
        assert_eq!(Grid::linear(-1.0, 1.0, 3).values(), alloc::vec![-1.0, 0.0, 1.0]);
        assert_eq!(Grid::linear(2.0, 2.0, 1).values(), alloc::vec![2.0]);
    }

    #[test]
    fn dyadic() {
        assert_eq!(dyadic_up_to(30.0), alloc::vec![2.0, 4.0, 8.0, 16.0, 32.0]);
        assert_eq!(dyadic_up_to(2.0), alloc::vec![2.0]);
        assert_eq!(dyadic_up_to(64.0).last(), Some(&64.0));
    }

    #[test]
    fn invalid_grids() {
        assert!(Grid::log(0.0, 1.0, 3).validate().is_err());
        assert!(Grid::linear(1.0, 0.0, 3).validate().is_err());
        assert!(Grid::Values(alloc::vec![]).validate().is_err());
    }
}
