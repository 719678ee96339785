//! Operator models for weighted shifts on a truncated Fock space.
//!
//! The library works with the full Fock space over `C^d` cut off at word
//! length `K`, so every operator is an ordinary complex matrix carrying a
//! graded block structure indexed by word length.  On top of that it provides:
//!
//! - [`fock`]: creation operators, block-diagonal weight operators built from
//!   a [`fock::WeightSpec`] rule, gauge projections onto fixed block
//!   diagonals, positivization of a weight sequence by a block-diagonal
//!   unitary, and defect measurements for asymptotic periodicity of the
//!   weight tail.
//! - [`matalg`]: finite-dimensional `*`-algebras spanned by matrices;
//!   generation by closure under products and adjoints, decomposition into
//!   simple summands, the ideal lattice, matrix-unit relation checks, and a
//!   two-coordinate test for when two generating pairs satisfy the same
//!   polynomial identities.
//! - [`quotient`]: the finite-dimensional corner algebra attached to an
//!   eventually periodic weight sequence, the swap action on its summands,
//!   corner-to-corner compressions, invariant ideals, a simplicity decision
//!   procedure, and a direct-limit connecting map.
//! - [`repcheck`]: residual checks for candidate representations (isometry
//!   relations, commutation with the weight image, matrix-unit and spectral
//!   corner conditions, and the corner generator dictionary).
//!
//! The crate is `no_std` (with `alloc`); IO and file formats live in the
//! companion CLI crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod cmat;
pub mod error;
pub mod fock;
pub mod matalg;
pub mod quotient;
pub mod repcheck;
pub mod word;

pub use error::{Error, Result};
