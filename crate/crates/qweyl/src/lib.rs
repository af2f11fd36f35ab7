//! Symbolic workbench for connected quantized Weyl algebras.
//!
//! The crate computes exact normal forms in quadratic algebras presented by
//! `x_i x_j = q_ij x_j x_i + r_ij`, arithmetic in quantum tori, quantum seed
//! mutation, and Poisson brackets on the commutative q→1 limits. Everything
//! runs over the exact coefficient ring ℚ[v^±1] with q = v², so every check
//! is an identity test with zero tolerance.
//!
//! Module map:
//! - [`scalar`]: coefficients, Laurent polynomials in v over ℚ.
//! - [`pbw`]: the rewriting kernel, presets, distinguished elements, the PBW
//!   criterion and its brute-force oracle, classification, structure suites.
//! - [`qtorus`]: skew-commutative Laurent arithmetic, normalized monomials,
//!   exact one-sided division, embedding and splitting checks.
//! - [`cluster`]: exchange matrices, quantum seeds, mutation, the quiver
//!   presets and the cluster verification suite.
//! - [`poisson`]: commutative Poisson engine, semiclassical limits, integer
//!   kernels, principal-ideal membership, the Poisson verification suite.
//! - [`cli`]: expression parser, renderer, and the command-line front end.

pub mod cli;
pub mod error;
pub mod cluster;
pub mod pbw;
pub mod poisson;
pub mod qtorus;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
