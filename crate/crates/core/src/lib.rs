//! Fractional power series `z ± Σ aₙ z^{μn}` on the slit unit disk.
//!
//! The crate is organised bottom-up:
//!
//! - [`fps`]: series values, evaluation, differentiation, Hadamard products
//! - [`operators`]: the `(μn)^β` multiplier operator, Θ kernels, and the
//!   fractional derivative/integral acting termwise through Γ-ratios
//! - [`classes`]: subordination class parameters, the coefficient weight Ξ(n),
//!   membership certificates, extremal functions and extreme points
//! - [`geometry`]: grid-based numerical oracles (order functionals,
//!   subordination residual, radius search, integral means)
//! - [`bounds`]: closed-form distortion and radius bounds paired with oracles
//! - [`job`]: the JSON job runner behind the `fracdisk` binary
//!
//! Grid sweeps run on rayon when the `parallel` feature is enabled (default)
//! and fall back to a sequential loop otherwise; results are identical.

#![cfg_attr(test, allow(clippy::approx_constant, clippy::excessive_precision))]

pub mod bounds;
pub mod classes;
mod error;
pub mod fps;
pub mod geometry;
pub mod job;
mod mu;
pub mod operators;
pub mod par;

pub use error::{Error, Result};
pub use mu::Mu;
