//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here acts on Euclidean matrices; weighted norms are reduced to
//! Euclidean ones by [`crate::OperatorSystem::euclidean_form`] before any of
//! these routines are called.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Above this size the smallest singular value is found by inverse iteration
/// instead of a full SVD.
pub const SVD_DIM_LIMIT: usize = 400;

const INVERSE_ITERATIONS: usize = 20;
const INVERSE_TOL: f64 = 1e-10;
const INVERSE_RESTARTS: usize = 3;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Maximum absolute column sum.
pub fn norm1(m: &CMat) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm_sqr(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Largest singular value (Euclidean operator norm).
pub fn sigma_max(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Smallest singular value: full SVD up to [`SVD_DIM_LIMIT`], shifted inverse
/// iteration on `MᴴM` above it.
///
/// Returns `0.0` when `m` is exactly singular.
pub fn sigma_min(m: &CMat) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return f64::INFINITY;
    }
    if n <= SVD_DIM_LIMIT {
        m.clone()
            .singular_values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    } else {
        sigma_min_inverse_iteration(m)
    }
}

/// Inverse iteration for the smallest singular value of a square matrix.
///
/// Runs up to 20 iterations per start with relative tolerance `1e-10`; when a
/// start stagnates it restarts from a fresh pseudo-random vector and keeps the
/// smallest value seen. The random stream is seeded deterministically.
pub fn sigma_min_inverse_iteration(m: &CMat) -> f64 {
    let n = m.nrows();
    let lu = m.clone().lu();
    let lu_adj = m.adjoint().lu();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001 ^ n as u64);
    let mut best = f64::INFINITY;
    for _ in 0..INVERSE_RESTARTS {
        let mut v = random_unit(n, &mut rng);
        let mut prev = 0.0;
        let mut converged = false;
        for _ in 0..INVERSE_ITERATIONS {
            // z = (MᴴM)⁻¹ v
            let Some(w) = lu_adj.solve(&v) else { return 0.0 };
            let Some(z) = lu.solve(&w) else { return 0.0 };
            let mu = vec_norm(&z);
            if !mu.is_finite() || mu == 0.0 {
                return 0.0;
            }
            v = z / Complex64::from(mu);
            if prev > 0.0 && ((mu - prev) / mu).abs() < INVERSE_TOL {
                converged = true;
                break;
            }
            prev = mu;
        }
        // ‖Mv‖ for unit v is an upper bound on σ_min, tight at convergence.
        let est = vec_norm(&(m * &v));
        best = best.min(est);
        if converged {
            break;
        }
    }
    best
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> CVec {
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    let v = CVec::from_fn(n, |_, _| Complex64::new(unit(), unit()));
    let norm = vec_norm(&v);
    v / Complex64::from(norm)
}

/// Largest eigenvalue of a Hermitian matrix (the input is symmetrized first).
pub fn hermitian_max_eig(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let h = (m + m.adjoint()) * Complex64::from(0.5);
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

// Padé scaling-and-squaring (Higham 2005). θ_m bounds ‖A‖₁ for degree m.
const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let norm = norm1(a);
    let ident = identity(n);
    for (theta, coeffs) in [
        (THETA_3, &B3[..]),
        (THETA_5, &B5[..]),
        (THETA_7, &B7[..]),
        (THETA_9, &B9[..]),
    ] {
        if norm <= theta {
            let (u, v) = pade_low(a, coeffs, &ident);
            return pade_solve(&u, &v);
        }
    }
    let mut squarings = 0u32;
    if norm > THETA_13 {
        squarings = (norm / THETA_13).log2().ceil().max(0.0) as u32;
    }
    let scale = Complex64::from(2f64.powi(-(squarings as i32)));
    let scaled = a * scale;
    let (u, v) = pade13(&scaled, &ident);
    let mut r = pade_solve(&u, &v);
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

fn pade_low(a: &CMat, b: &[f64], ident: &CMat) -> (CMat, CMat) {
    let a2 = a * a;
    let c = |x: f64| Complex64::from(x);
    let mut odd = ident * c(b[1]);
    let mut even = ident * c(b[0]);
    let mut power = ident.clone();
    let m = b.len() - 1;
    for k in 1..=m / 2 {
        power = &power * &a2;
        even += &power * c(b[2 * k]);
        odd += &power * c(b[2 * k + 1]);
    }
    (a * odd, even)
}

fn pade13(a: &CMat, ident: &CMat) -> (CMat, CMat) {
    let c = |x: f64| Complex64::from(x);
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]);
    let u = a * (&a6 * inner_u + &a6 * c(b[7]) + &a4 * c(b[5]) + &a2 * c(b[3]) + ident * c(b[1]));
    let inner_v = &a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]);
    let v = &a6 * inner_v + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + ident * c(b[0]);
    (u, v)
}

fn pade_solve(u: &CMat, v: &CMat) -> CMat {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular within the degree's norm bound")
}

/// Connected components of the nonzero pattern of a square matrix, treating
/// `m[i, j] != 0` as an undirected edge. Components are ordered by their
/// smallest index and each index list is sorted.
pub fn components(m: &CMat) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for j in 0..n {
        for i in 0..n {
            if i != j && m[(i, j)] != Complex64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push(Vec::new());
        }
        out[slot[root]].push(i);
    }
    out
}

/// A square matrix split along a partition of its index set into decoupled
/// diagonal blocks. Every matrix function used here (exponential, resolvent,
/// Gram integral) acts block by block, and operator norms are maxima over
/// blocks.
#[derive(Debug, Clone)]
pub struct BlockForm {
    dim: usize,
    blocks: Vec<Block>,
}

#[derive(Debug, Clone)]
pub struct Block {
    pub indices: Vec<usize>,
    pub mat: CMat,
}

impl BlockForm {
    /// `partition` must list every index of `m` exactly once, and `m` must
    /// vanish outside the diagonal blocks it induces.
    pub fn new(m: &CMat, partition: &[Vec<usize>]) -> Self {
        let blocks = partition
            .iter()
            .map(|idx| Block {
                indices: idx.clone(),
                mat: CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]),
            })
            .collect();
        BlockForm {
            dim: m.nrows(),
            blocks,
        }
    }

    pub fn dense(m: &CMat) -> Self {
        BlockForm {
            dim: m.nrows(),
            blocks: vec![Block {
                indices: (0..m.nrows()).collect(),
                mat: m.clone(),
            }],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.indices.len()).max().unwrap_or(0)
    }

    pub fn gather(&self, x: &CVec) -> Vec<CVec> {
        self.blocks
            .iter()
            .map(|b| CVec::from_fn(b.indices.len(), |i, _| x[b.indices[i]]))
            .collect()
    }

    pub fn scatter_vec(&self, parts: &[CVec]) -> CVec {
        let mut out = CVec::zeros(self.dim);
        for (b, p) in self.blocks.iter().zip(parts) {
            for (i, &gi) in b.indices.iter().enumerate() {
                out[gi] = p[i];
            }
        }
        out
    }

    pub fn scatter(&self, parts: &[CMat]) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for (b, p) in self.blocks.iter().zip(parts) {
            for (j, &gj) in b.indices.iter().enumerate() {
                for (i, &gi) in b.indices.iter().enumerate() {
                    out[(gi, gj)] = p[(i, j)];
                }
            }
        }
        out
    }

    /// Applies `f` to every block matrix.
    pub fn map<R>(&self, f: impl FnMut(&CMat) -> R) -> Vec<R> {
        self.blocks.iter().map(|b| &b.mat).map(f).collect()
    }
}

/// Smallest singular value of `λI - M` over all blocks, or an error when it
/// vanishes to working precision.
pub fn shifted_sigma_min(form: &BlockForm, lambda: Complex64) -> Result<f64> {
    let mut smallest = f64::INFINITY;
    for b in form.blocks() {
        let n = b.mat.nrows();
        let shifted = CMat::from_fn(n, n, |i, j| {
            let d = if i == j { lambda } else { Complex64::new(0.0, 0.0) };
            d - b.mat[(i, j)]
        });
        let s = sigma_min(&shifted);
        let scale = norm1(&shifted).max(1.0);
        if !(s > f64::EPSILON * scale) {
            return Err(Error::ResolventUndefined { lambda });
        }
        smallest = smallest.min(s);
    }
    Ok(smallest)
}
