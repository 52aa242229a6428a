//! Electromagnetic duality structures of four-dimensional ungauged
//! supergravity.
//!
//! The crate works with a fixed symplectic vector space `(S, ω)` of
//! dimension `2 n_v` and provides:
//!
//! * [`symplectic`]: tamings, electromagnetic pairs and points of the Siegel
//!   upper half space, with the maps between them and the fractional action
//!   of `Sp(2n, R)`.
//! * [`model`]: a small expression language for scalar-dependent period
//!   matrices `N(φ)` over a scalar chart, with symbolic derivatives.
//! * [`duality`]: the stabilizer and U-duality Lie algebras of a model and
//!   the lift of scalar isometries to symplectic generators.
//! * [`holonomy`]: finitely presented flat duality bundles, centralizer
//!   algebras and trace invariants of words.
//! * [`field`]: pointwise algebra of bundle-valued forms: Hodge star,
//!   twisted star, polarized self-dual projection, stress tensors.
//! * [`eom`]: finite-difference residuals of the coupled Einstein, scalar and
//!   Maxwell equations on Cartesian patches, and transport of
//!   configurations along duality pairs.
//! * [`spinor`]: real Killing spinors on frame patches and their bilinears.
//!
//! Every numerical check produces a residual together with the tolerance it
//! was measured against, see [`report`].

pub mod duality;
pub mod eom;
pub mod error;
pub mod field;
pub mod holonomy;
pub mod linalg;
pub mod model;
pub mod report;
pub mod sampling;
pub mod spinor;
pub mod symplectic;

#[doc(hidden)]
pub mod cli;

pub use error::{Error, Result};

/// Real dynamically sized matrix.
pub type RMat = nalgebra::DMatrix<f64>;
/// Complex dynamically sized matrix.
pub type CMat = nalgebra::DMatrix<num_complex::Complex64>;
