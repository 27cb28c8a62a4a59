//! Generator systems: a dense matrix `A` plus the diagonal weight of the
//! inner product `⟨x, y⟩ = Σ w_i x_i conj(y_i)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, BlockForm, CMat, CVec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A finite generator with semantics `T_t = exp(-tA)`.
///
/// Immutable once built; all transforms return new systems.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSystem {
    gen: CMat,
    weight: Vec<f64>,
    label: String,
    shift: f64,
    partition: Vec<Vec<usize>>,
}

impl OperatorSystem {
    /// Validates and wraps a generator with its weight.
    pub fn new(gen: CMat, weight: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let n = gen.nrows();
        if n == 0 {
            return Err(Error::config("generator must have at least one row"));
        }
        if gen.ncols() != n {
            return Err(Error::config(format!(
                "generator must be square, got {}x{}",
                n,
                gen.ncols()
            )));
        }
        if weight.len() != n {
            return Err(Error::config(format!(
                "weight has length {}, expected {}",
                weight.len(),
                n
            )));
        }
        if let Some(w) = weight.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::config(format!("weights must be finite and positive, got {w}")));
        }
        if gen.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::config("generator entries must be finite"));
        }
        let partition = linalg::components(&gen);
        Ok(OperatorSystem {
            gen,
            weight,
            label: label.into(),
            shift: 0.0,
            partition,
        })
    }

    pub fn dim(&self) -> usize {
        self.gen.nrows()
    }

    pub fn gen(&self) -> &CMat {
        &self.gen
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Accumulated real shift `ω` of `A ← A + ωI`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Index sets of the decoupled diagonal blocks of `A`.
    pub fn partition(&self) -> &[Vec<usize>] {
        &self.partition
    }

    /// `Ã = D A D⁻¹` with `D = diag(√w)`: weighted norms of functions of `A`
    /// equal Euclidean norms of the same functions of `Ã`.
    pub fn euclidean_form(&self) -> CMat {
        let d: Vec<f64> = self.weight.iter().map(|w| w.sqrt()).collect();
        CMat::from_fn(self.dim(), self.dim(), |i, j| self.gen[(i, j)] * (d[i] / d[j]))
    }

    pub(crate) fn euclidean_blocks(&self) -> BlockForm {
        BlockForm::new(&self.euclidean_form(), &self.partition)
    }

    /// H-adjoint generator `W⁻¹ Aᴴ W`.
    pub fn adjoint(&self) -> OperatorSystem {
        let w = &self.weight;
        let gen = CMat::from_fn(self.dim(), self.dim(), |i, j| {
            self.gen[(j, i)].conj() * (w[j] / w[i])
        });
        OperatorSystem {
            partition: linalg::components(&gen),
            gen,
            weight: self.weight.clone(),
            label: format!("{}*", self.label),
            shift: self.shift,
        }
    }

    /// Generator `A + ωI`.
    pub fn shifted(&self, omega: f64) -> OperatorSystem {
        if omega == 0.0 {
            return self.clone();
        }
        let mut gen = self.gen.clone();
        for i in 0..self.dim() {
            gen[(i, i)] += Complex64::from(omega);
        }
        OperatorSystem {
            gen,
            weight: self.weight.clone(),
            label: format!("{}+{}", self.label, omega),
            shift: self.shift + omega,
            partition: self.partition.clone(),
        }
    }

    /// Generator `-A`, i.e. the backward direction of a group.
    pub fn reversed(&self) -> OperatorSystem {
        OperatorSystem {
            gen: -self.gen.clone(),
            weight: self.weight.clone(),
            label: format!("-({})", self.label),
            shift: -self.shift,
            partition: self.partition.clone(),
        }
    }

    /// Weighted inner product `⟨x, y⟩_H`.
    pub fn inner(&self, x: &CVec, y: &CVec) -> Complex64 {
        x.iter()
            .zip(y.iter())
            .zip(&self.weight)
            .map(|((a, b), w)| a * b.conj() * *w)
            .sum()
    }

    pub fn norm(&self, x: &CVec) -> f64 {
        self.norm_sqr(x).sqrt()
    }

    pub fn norm_sqr(&self, x: &CVec) -> f64 {
        x.iter().zip(&self.weight).map(|(a, w)| a.norm_sqr() * w).sum()
    }

    /// `D x`: maps an H-vector to the Euclidean coordinates used by `Ã`.
    pub fn to_euclidean(&self, x: &CVec) -> CVec {
        CVec::from_fn(self.dim(), |i, _| x[i] * self.weight[i].sqrt())
    }

    pub(crate) fn check_vector(&self, x: &CVec) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::config(format!(
                "vector has length {}, system dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        if x.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::config("vector entries must be finite"));
        }
        if self.norm_sqr(x) == 0.0 {
            return Err(Error::config("trial vector must be nonzero"));
        }
        Ok(())
    }
}

fn check_half_plane(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::config(format!("eigenvalue {z} is not finite")));
    }
    if z.re < 0.0 {
        return Err(Error::Spectrum { value: z });
    }
    Ok(())
}

/// `A = diag(eigs)` with unit weight.
pub fn build_diagonal(eigs: &[Complex64]) -> Result<OperatorSystem> {
    if eigs.is_empty() {
        return Err(Error::config("diagonal generator needs at least one eigenvalue"));
    }
    for &z in eigs {
        check_half_plane(z)?;
    }
    let gen = CMat::from_diagonal(&CVec::from_column_slice(eigs));
    OperatorSystem::new(gen, alloc::vec![1.0; eigs.len()], format!("diagonal[{}]", eigs.len()))
}

/// Jordan block `eig·I + N` (ones on the superdiagonal) with unit weight.
pub fn build_jordan(eig: Complex64, size: usize) -> Result<OperatorSystem> {
    if size == 0 {
        return Err(Error::config("jordan block size must be positive"));
    }
    check_half_plane(eig)?;
    let gen = CMat::from_fn(size, size, |i, j| {
        if i == j {
            eig
        } else if j == i + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    OperatorSystem::new(gen, alloc::vec![1.0; size], format!("jordan({eig},{size})"))
}

/// Fourier truncation of the perturbed wave operator on the 2-torus:
/// modes `m ∈ [-nx, nx]`, `n ∈ [-ny, ny]` for each of two components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveTruncationParams {
    pub nx: usize,
    pub ny: usize,
}

impl WaveTruncationParams {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::config("wave truncation needs nx >= 1 and ny >= 1"));
        }
        Ok(WaveTruncationParams { nx, ny })
    }

    fn modes_x(&self) -> usize {
        2 * self.nx + 1
    }

    fn modes_y(&self) -> usize {
        2 * self.ny + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.modes_x() * self.modes_y()
    }

    /// Flat index of component `c ∈ {1, 2}` and mode `(m, n)`; `None` when the
    /// triple is outside the truncation.
    pub fn idx(&self, c: usize, m: i64, n: i64) -> Option<usize> {
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        if !(c == 1 || c == 2) || m.abs() > nx || n.abs() > ny {
            return None;
        }
        let block = self.modes_x() * self.modes_y();
        Some((c - 1) * block + (m + nx) as usize * self.modes_y() + (n + ny) as usize)
    }

    /// Inverse of [`Self::idx`].
    pub fn mode(&self, index: usize) -> Option<(usize, i64, i64)> {
        if index >= self.dim() {
            return None;
        }
        let block = self.modes_x() * self.modes_y();
        let c = index / block + 1;
        let rest = index % block;
        let m = (rest / self.modes_y()) as i64 - self.nx as i64;
        let n = (rest % self.modes_y()) as i64 - self.ny as i64;
        Some((c, m, n))
    }
}

/// Assembles
///
/// ```text
/// A = [ 0            -1 ]
///     [ -Δ - M ∂/∂x    0 ]
/// ```
///
/// in the basis `e^{i(mx+ny)}`, where `M` multiplies by `e^{iy}` (shifting
/// `n → n+1`; the image of the edge mode `n = ny` is dropped). The weight is
/// `1 + m² + n²` on the first component (`W^{1,2}`) and `1` on the second (`L²`).
pub fn build_wave(params: WaveTruncationParams) -> Result<OperatorSystem> {
    let params = WaveTruncationParams::new(params.nx, params.ny)?;
    let dim = params.dim();
    let (nx, ny) = (params.nx as i64, params.ny as i64);
    let mut gen = CMat::zeros(dim, dim);
    let mut weight = alloc::vec![1.0; dim];
    for m in -nx..=nx {
        for n in -ny..=ny {
            let u1 = params.idx(1, m, n).expect("mode in range");
            let u2 = params.idx(2, m, n).expect("mode in range");
            weight[u1] = (1 + m * m + n * n) as f64;
            gen[(u1, u2)] = Complex64::new(-1.0, 0.0);
            gen[(u2, u1)] = Complex64::new((m * m + n * n) as f64, 0.0);
            if let Some(below) = params.idx(1, m, n - 1) {
                gen[(u2, below)] = Complex64::new(0.0, -(m as f64));
            }
        }
    }
    OperatorSystem::new(gen, weight, format!("wave({},{})", params.nx, params.ny))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::expm_semigroup;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_rejects_bad_input() {
        assert!(matches!(build_diagonal(&[]), Err(Error::Config(_))));
        assert!(matches!(
            build_diagonal(&[c(1.0, 0.0), c(-0.5, 2.0)]),
            Err(Error::Spectrum { .. })
        ));
        assert!(build_diagonal(&[c(0.0, 3.0)]).is_ok());
    }

    #[test]
    fn jordan_rejects_bad_input() {
        assert!(matches!(build_jordan(c(0.0, 0.0), 0), Err(Error::Config(_))));
        assert!(matches!(build_jordan(c(-1.0, 0.0), 2), Err(Error::Spectrum { .. })));
    }

    #[test]
    fn jordan_size_one_is_diagonal() {
        let j = build_jordan(c(0.0, 0.0), 1).unwrap();
        let d = build_diagonal(&[c(0.0, 0.0)]).unwrap();
        assert_eq!(j.gen(), d.gen());
        assert_eq!(j.weight(), d.weight());
    }

    #[test]
    fn jordan_three_matches_nilpotent_series() {
        let sys = build_jordan(c(1.0, 0.0), 3).unwrap();
        for &t in &[0.0, 0.7, 2.5] {
            let e = expm_semigroup(&sys, t).unwrap();
            let f = (-t).exp();
            let expected = [
                [1.0, -t, t * t / 2.0],
                [0.0, 1.0, -t],
                [0.0, 0.0, 1.0],
            ];
            for i in 0..3 {
                for j in 0..3 {
                    assert!((e[(i, j)] - c(f * expected[i][j], 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn euclidean_form_examples() {
        let sys = OperatorSystem::new(CMat::from_element(1, 1, c(2.0, 0.0)), alloc::vec![9.0], "s")
            .unwrap();
        assert_eq!(sys.euclidean_form()[(0, 0)], c(2.0, 0.0));

        let gen = CMat::from_row_slice(2, 2, &[ZERO, c(1.0, 0.0), ZERO, ZERO]);
        let sys = OperatorSystem::new(gen, alloc::vec![4.0, 1.0], "n").unwrap();
        let e = sys.euclidean_form();
        assert_eq!(e[(0, 1)], c(2.0, 0.0));
        assert_eq!(e[(1, 0)], ZERO);
    }

    #[test]
    fn adjoint_of_skew_diagonal() {
        let eigs: Vec<_> = (-3..=3).map(|k| c(0.0, k as f64)).collect();
        let sys = build_diagonal(&eigs).unwrap();
        let adj = sys.adjoint();
        for (i, k) in (-3..=3).enumerate() {
            assert_eq!(adj.gen()[(i, i)], c(0.0, -(k as f64)));
        }
    }

    #[test]
    fn adjoint_of_real_symmetric_is_itself() {
        let gen = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]);
        let sys = OperatorSystem::new(gen.clone(), alloc::vec![1.0, 1.0], "sym").unwrap();
        assert_eq!(sys.adjoint().gen(), &gen);
    }

    #[test]
    fn invalid_systems_rejected() {
        let gen = CMat::from_element(2, 2, c(1.0, 0.0));
        assert!(OperatorSystem::new(gen.clone(), alloc::vec![1.0], "w").is_err());
        assert!(OperatorSystem::new(gen.clone(), alloc::vec![1.0, 0.0], "w").is_err());
        assert!(OperatorSystem::new(gen, alloc::vec![1.0, f64::NAN], "w").is_err());
        let mut bad = CMat::zeros(1, 1);
        bad[(0, 0)] = c(f64::INFINITY, 0.0);
        assert!(OperatorSystem::new(bad, alloc::vec![1.0], "inf").is_err());
        assert!(OperatorSystem::new(CMat::zeros(2, 3), alloc::vec![1.0, 1.0], "rect").is_err());
    }

    #[test]
    fn wave_small_truncation_entries() {
        let p = WaveTruncationParams::new(1, 1).unwrap();
        let sys = build_wave(p).unwrap();
        assert_eq!(sys.dim(), 18);
        let g = sys.gen();
        let row = p.idx(2, 1, 0).unwrap();
        assert_eq!(g[(row, p.idx(1, 1, 0).unwrap())], c(1.0, 0.0));
        assert_eq!(g[(row, p.idx(1, 1, -1).unwrap())], c(0.0, -1.0));
        let nonzero = (0..18).filter(|&j| g[(row, j)] != ZERO).count();
        assert_eq!(nonzero, 2);

        // The (0, 0) mode: only the -1 coupling in the first row is nonzero.
        let free = p.idx(2, 0, 0).unwrap();
        assert!((0..18).all(|j| g[(free, j)] == ZERO));
        assert_eq!(g[(p.idx(1, 0, 0).unwrap(), free)], c(-1.0, 0.0));
    }

    #[test]
    fn wave_edge_mode_has_no_shift_source() {
        let p = WaveTruncationParams::new(2, 2).unwrap();
        let sys = build_wave(p).unwrap();
        // Row (2, m, -ny) would need column (1, m, -ny - 1), which is dropped.
        let row = p.idx(2, 1, -2).unwrap();
        let nonzero: Vec<_> = (0..sys.dim()).filter(|&j| sys.gen()[(row, j)] != ZERO).collect();
        assert_eq!(nonzero, alloc::vec![p.idx(1, 1, -2).unwrap()]);
    }

    #[test]
    fn wave_weights() {
        let p = WaveTruncationParams::new(2, 1).unwrap();
        let sys = build_wave(p).unwrap();
        assert_eq!(sys.weight()[p.idx(1, 2, -1).unwrap()], 6.0);
        assert_eq!(sys.weight()[p.idx(2, 2, -1).unwrap()], 1.0);
    }

    #[test]
    fn wave_decouples_by_x_mode() {
        let p = WaveTruncationParams::new(2, 2).unwrap();
        let sys = build_wave(p).unwrap();
        // m != 0 gives one block of size 2(2ny+1) each; m = 0 splits into pairs.
        let mut sizes: Vec<usize> = sys.partition().iter().map(|b| b.len()).collect();
        sizes.sort();
        assert_eq!(sizes, [alloc::vec![2; 5], alloc::vec![10; 4]].concat());
    }

    #[test]
    fn shift_and_reverse_fields() {
        let sys = build_diagonal(&[c(1.0, 0.0)]).unwrap();
        assert_eq!(sys.shifted(0.0), sys);
        let s = sys.shifted(0.5);
        assert_eq!(s.gen()[(0, 0)], c(1.5, 0.0));
        assert_eq!(s.shift(), 0.5);
        let r = s.reversed();
        assert_eq!(r.gen()[(0, 0)], c(-1.5, 0.0));
        assert_eq!(r.shift(), -0.5);
    }

    #[test]
    fn proposition_generators() {
        let p = WaveTruncationParams::new(1, 1).unwrap();
        let sys = build_wave(p).unwrap();
        let fwd = sys.shifted(0.5);
        let bwd = sys.reversed().shifted(0.5);
        let half = Complex64::from(0.5);
        let id = CMat::identity(18, 18);
        assert_eq!(fwd.gen(), &(sys.gen() + &id * half));
        assert_eq!(bwd.gen(), &(-sys.gen() + &id * half));
    }
}
