//! Numerical companion for isometric embeddings of absolute direct sums into `L_p`.
//!
//! The crate provides
//!
//! * complex special functions and the Gaussian / stable moment functions
//!   ([`specfun`]),
//! * double-exponential quadrature on the half line ([`quad`]),
//! * the two-variable transforms `F_N`, `F̃_N` and `M_{p,N}` of a normalized
//!   absolute norm on the plane ([`absnorm`]),
//! * a generic numerical Mellin transform with strip detection and a nested
//!   Monte Carlo variant ([`mellin`]),
//! * seeded, splittable samplers for Gaussian, positive and symmetric stable,
//!   Beta-power and tilted product random variables ([`stochastic`]),
//! * the explicit embeddings of `ℓ₂^m ⊕_r ℓ_q^n` ([`embed`]),
//! * named verification procedures returning machine-readable reports
//!   ([`checks`]) and the command-line front end ([`cli`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod absnorm;
pub mod checks;
pub mod cli;
pub mod embed;
mod error;
pub mod mellin;
pub mod quad;
pub mod specfun;
pub mod stochastic;

pub use error::{Error, Result};
pub use num_complex::Complex64;
