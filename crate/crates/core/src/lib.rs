//! Numerical toolkit for the memory-diffusion logistic model
//! uₜ = Δu + D∇·(u∇u_τ) + λu(m(x) − u) on an interval.

// NaN must fail these checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod dense;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod expr;
pub mod grid;
pub mod plot;
pub mod spectrum;
pub mod steady;
pub mod tridiag;

pub use error::{Error, Result};
