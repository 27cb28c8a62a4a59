//! Closed-form and self-consistency oracles for the numerical kernels.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use kreiss_core::bounds::{remark_alpha_check, resolvent_to_cesaro_check, theorem_bound_check};
use kreiss_core::linalg::{self, shifted_sigma_min, BlockForm};
use kreiss_core::operators::{build_diagonal, build_jordan, build_wave};
use kreiss_core::propagator::{cesaro_constants, expm_semigroup, semigroup_norm, trajectory};
use kreiss_core::resolvent::{line_integral_l2, resolvent_norm};
use kreiss_core::{CVec, WaveTruncationParams};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn jordan_norm_matches_closed_form() {
    let sys = build_jordan(c(0.0, 0.0), 2).unwrap();
    for t in [0.5, 2.0, 7.0, 30.0] {
        let exact = (t + (t * t + 4.0f64).sqrt()) / 2.0;
        assert_relative_eq!(semigroup_norm(&sys, t).unwrap(), exact, max_relative = 1e-12);
    }
}

#[test]
fn jordan_resolvent_at_minus_tenth() {
    let sys = build_jordan(c(0.0, 0.0), 2).unwrap();
    let norm = resolvent_norm(&sys, c(-0.1, 0.0)).unwrap().norm;
    assert_relative_eq!(norm, 50.0 + 2600f64.sqrt(), max_relative = 1e-12);
    assert!((norm - 100.99).abs() < 5e-3);
}

#[test]
fn scalar_line_integrals() {
    let one = CVec::from_element(1, c(1.0, 0.0));
    for (a, r) in [(1.0, 1.0), (0.0, 1.0), (2.0, 0.5)] {
        let sys = build_diagonal(&[c(a, 0.0)]).unwrap();
        let li = line_integral_l2(&sys, r, &one, 1e-9).unwrap();
        assert!((li.value - PI / (r + a)).abs() <= 1e-8 + li.tail_bound);
    }
}

#[test]
fn cesaro_examples() {
    let unitary: Vec<_> = (-8..=8).map(|k| c(0.0, k as f64)).collect();
    let est = cesaro_constants(&build_diagonal(&unitary).unwrap(), 1.0, &[2.0, 4.0, 8.0]).unwrap();
    assert_relative_eq!(est.c_max(), 0.5, max_relative = 1e-9);

    let est = cesaro_constants(&build_diagonal(&[c(1.0, 0.0)]).unwrap(), 1.0, &[2.0, 4.0]).unwrap();
    assert_relative_eq!(est.c_primal, (1.0 - (-4f64).exp()) / 8.0, max_relative = 1e-8);
}

#[test]
fn resolvent_to_cesaro_scalar_zero() {
    let sys = build_diagonal(&[c(0.0, 0.0)]).unwrap();
    let one = CVec::from_element(1, c(1.0, 0.0));
    let e = resolvent_to_cesaro_check(&sys, 1.0, &[4.0], &[one], 1e-8).unwrap();
    assert_relative_eq!(e.left[0], 4.0, max_relative = 1e-9);
    assert_relative_eq!(e.right[0], 2.0 * std::f64::consts::E.powi(2), max_relative = 1e-6);
    assert!(e.pass);
}

#[test]
fn unitary_theorem_bound_up_to_256() {
    let eigs: Vec<_> = (-8..=8).map(|k| c(0.0, k as f64)).collect();
    let sys = build_diagonal(&eigs).unwrap();
    let ts = [4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];
    let out = theorem_bound_check(&sys, 1.0, &ts).unwrap();
    assert!(out.entry.pass, "{:?}", out.entry);
    for (t, bound) in ts.iter().zip(&out.entry.right) {
        let l = t.log2().floor();
        assert_relative_eq!(*bound, t / l.sqrt(), max_relative = 1e-8);
    }
}

#[test]
fn scalar_zero_remark_bound() {
    let sys = build_diagonal(&[c(0.0, 0.0)]).unwrap();
    let out = remark_alpha_check(&sys, 2.0, &[4.0, 10.0]).unwrap();
    assert!(out.entry.pass);
    assert_relative_eq!(out.entry.right[0], 4.0 * out.cesaro.c_max() * 16.0, max_relative = 1e-12);
}

#[test]
fn stepping_agrees_with_direct_exponential_on_wave() {
    let sys = build_wave(WaveTruncationParams::new(4, 4).unwrap()).unwrap();
    let grid: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
    let stepped = trajectory(&sys, &grid, &[]).unwrap();
    let direct = semigroup_norm(&sys, 10.0).unwrap();
    let last = stepped.last().unwrap();
    assert_eq!(last.t, 10.0);
    assert_relative_eq!(last.op_norm, direct, max_relative = 1e-6);
}

#[test]
fn block_form_matches_dense_computation() {
    let sys = build_wave(WaveTruncationParams::new(2, 2).unwrap()).unwrap();
    let dense = sys.euclidean_form();
    let blocks = BlockForm::new(&dense, sys.partition());
    assert!(blocks.blocks().len() > 1);
    let whole = BlockForm::dense(&dense);
    for lambda in [c(-0.3, 0.0), c(-0.05, 2.2), c(-0.9, -5.0)] {
        let a = shifted_sigma_min(&blocks, lambda).unwrap();
        let b = shifted_sigma_min(&whole, lambda).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
    }
    let t = 1.7;
    let e = expm_semigroup(&sys, t).unwrap();
    let d: Vec<f64> = sys.weight().iter().map(|w| w.sqrt()).collect();
    let tilde = linalg::expm(&(&dense * c(-t, 0.0)));
    let err = (0..sys.dim())
        .flat_map(|i| (0..sys.dim()).map(move |j| (i, j)))
        .map(|(i, j)| (e[(i, j)] * (d[i] / d[j]) - tilde[(i, j)]).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
}
