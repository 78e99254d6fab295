//! Desk-scale laboratory for Dirichlet limit laws of k-part factorizations.
//!
//! Integers, monic polynomials over `F_q` and permutations all split into
//! `k` ordered parts; averaged over the ambient set, the normalized part sizes
//! converge to a Dirichlet law. This crate computes the finite-size
//! left-hand sides exactly (or by deterministic binning), evaluates the
//! limiting Dirichlet CDF by quadrature, and measures the gap.
//!
//! Engines are generic over the scalar type: [`Scalar`] covers `f32`, `f64`
//! and exact [`Rational`] arithmetic; [`Real`] covers the floating types used
//! by quadrature and sampling. The aliases below fix the common choices.

pub mod arith;
pub mod dirichlet;
mod error;
pub mod grid;
pub mod integers;
pub mod perms;
pub mod polyfield;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use grid::{DeviationReport, DeviationRow, RectGrid, RectQuery};
pub use scalar::{Real, Scalar};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

/// Dirichlet parameters in double precision.
pub type DirichletParams = dirichlet::DirichletParams<f64>;
/// Simplex point in double precision.
pub type SimplexPoint = dirichlet::SimplexPoint<f64>;
/// Dirichlet parameters in single precision.
pub type DirichletParamsF32 = dirichlet::DirichletParams<f32>;

/// Tool version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
