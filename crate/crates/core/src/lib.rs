//! Finite-dimensional laboratory for growth bounds of operator semigroups.
//!
//! A generator is stored as a dense complex matrix `A` together with a
//! positive diagonal weight defining the inner product of the state space.
//! The semigroup is `T_t = exp(-tA)` and the resolvent is `R(λ, A) = (λI - A)^{-1}`.
//!
//! The crate is `no_std` (with `alloc`). Enabling the `std` feature turns on
//! rayon-backed parallel grid evaluation; results are identical either way.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod operators;
pub mod propagator;
pub mod quadrature;
pub mod resolvent;

mod par;

pub use error::{Error, Result};
pub use grid::Grid;
pub use linalg::{CMat, CVec};
pub use operators::{OperatorSystem, WaveTruncationParams};
