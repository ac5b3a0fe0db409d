//! Spectral solvers for tempered fractional advection and diffusion
//! two-point boundary problems on [-1, 1].
//!
//! The equation treated is
//! `D^{a1,λ} u + d · D^{a2,λ} u = f` with tempered Riemann-Liouville
//! derivatives, in two regimes:
//!
//! - advection, `0 ≤ a2 < a1 < 1`: Petrov-Galerkin scheme with trial/test
//!   bases built from fractional integrals of Legendre polynomials;
//! - diffusion, `1 < a2 < a1 < 2`: Petrov-Galerkin tau scheme, Galerkin rows
//!   plus one explicit boundary row.
//!
//! Supporting layers: special functions ([`specfun`]), Gauss-Jacobi
//! quadrature ([`quadrature`]), closed-form and numeric fractional operators
//! ([`fracops`]), and a convergence-study harness ([`harness`]) that
//! reproduces the built-in example problems and emits CSV/SVG reports.

// `!(x > 0.0)`-style guards deliberately reject NaN; explicit index loops
// mirror the matrix algebra they implement
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod advection;
pub mod diffusion;
mod error;
pub mod fracops;
pub mod harness;
pub mod linalg;
pub mod quadrature;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
