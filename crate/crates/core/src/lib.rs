//! Closed forms, oracles and invariants for the sharp Fourier extension
//! inequality on the hyperboloid `{(y, √(s²+|y|²))}` in dimensions 2 and 3.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extension;
pub mod functionals;
pub mod geometry;
pub mod measures;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
