//! Sharp Hardy-type constants and inverse-square spectra restricted away from
//! the nodal set of a spherical harmonic.
//!
//! The crate is organised bottom-up:
//!
//! * [`quadrature`]: adaptive Gauss-Legendre integration, sphere areas and
//!   Monte Carlo sphere integrals.
//! * [`harmonics`]: eigenfunctions `P` of the Laplace-Beltrami operator on
//!   `S^{N-1}`, their eigenvalues, norms and nodal sets.
//! * [`hardy`]: the weight `psi`, the minimizing sequence `u_m`, Rayleigh
//!   quotients and the quadratic form of `-Δ + k/|x|²`.
//! * [`radial`]: the one-dimensional sector operator `-g'' + c/ρ²`, its
//!   Dirichlet truncations and the fall-to-the-center scan.
//! * [`cli`]: the command-line experiments and their CSV/JSON artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod hardy;
pub mod harmonics;
pub mod output;
pub mod quadrature;
pub mod radial;

pub use error::{Error, Result};
