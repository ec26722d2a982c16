//! Numerical toolkit for the fractional Laplacian `(-Δ)^s` on sampled fields.
//!
//! The crate evaluates the operator as a principal-value singular integral,
//! provides the closed-form kernels attached to the unit ball (Poisson kernel,
//! Riesz kernel, the bulk profile `g0`), Riesz potentials and s-harmonic
//! extensions, discrete Hölder / Ln-Lipschitz / Dini norm estimators, and an
//! experiment layer for blow-up rescaling audits and decay certificates.
//!
//! Everything here is `no_std` + `alloc`: pure functions over immutable data,
//! safe to call concurrently on shared inputs. IO, file formats, and the CLI
//! live in the companion `fraclap` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod expr;
pub mod field;
pub mod harness;
pub mod kernels;
pub mod norms;
pub mod operator;
pub mod params;
pub mod point;
pub mod potentials;
pub mod quad;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use field::{Exterior, Field, Grid};
pub use params::{holder_class, FracParams, HolderClass};
pub use point::Point;
pub use quad::QuadSpec;
