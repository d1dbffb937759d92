//! Exact computations in structural matrix algebras.
//!
//! A structural matrix algebra `A_ρ` is the span of the matrix units `E_ij` with
//! `(i, j)` in a quasi-order `ρ`. This crate decides diagonalization, Jordan
//! embedding and rank-preservation questions about such algebras with exact
//! Gaussian-rational arithmetic and returns checkable certificates.
//!
//! The algorithms are generic over [`Scalar`]; the aliases below fix the scalar
//! field to the Gaussian rationals, which is what the CLI uses.

pub mod cli;
pub mod diag;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod gaussian;
pub mod jordan;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod quasiorder;
pub mod rankpres;
pub mod scalar;
pub mod selftest;
pub mod transmap;

pub use error::{Error, Pair, Result};
pub use gaussian::GaussianRational;
pub use jordan::{CanonicalJordanForm, LinearMapOnSMA};
pub use matrix::DenseMatrix;
pub use poly::Poly;
pub use quasiorder::{ClassPartition, Permutation, QuasiOrder, Rectangle};
pub use rankpres::{Certificate, PreserverVerdict, VerdictKind};
pub use scalar::{Rational, Scalar};
pub use transmap::{all_transitive_trivial, random_transitive_map, TransitiveMap, TrivialityCertificate, WalkStep};

pub type Matrix = DenseMatrix<GaussianRational>;
pub type RationalMatrix = DenseMatrix<Rational>;
