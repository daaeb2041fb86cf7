//! Taylor expansion of an elliptic-curve L-function at the central point.
//!
//! Pipeline: integral Weierstrass model -> minimal model, reduction data and
//! conductor -> Dirichlet coefficients -> completed-L derivatives at s = 1
//! via the approximate functional equation -> analytic rank, leading and
//! sub-leading Taylor coefficients -> comparison against the closed-form
//! ratio gamma + ln(2 pi) - ln(N)/2 between them.

#![allow(clippy::manual_is_multiple_of)]

pub mod analytic;
pub mod arith;
pub mod coeffs;
pub mod curve;
mod error;
pub mod fixtures;
pub mod pipeline;
pub mod quad;
pub mod ratio;
pub mod selftest;

pub use error::{Error, Result};
