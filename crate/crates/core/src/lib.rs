//! Bound states of two particles in deformed Heisenberg algebras with a
//! minimal length.
//!
//! The two-body problem is reduced to a one-body integral equation in the
//! relative auxiliary momentum, parameterized by the conserved center-of-mass
//! momentum `p0`. Delta and Coulomb-like interactions both quantize through
//! the single condition
//!
//! ```text
//! ∫_{c1}^{c2} dp / (G^2(p0, p) + s) = kappa / M,      s = -2 M E,
//! ```
//!
//! which [`spectrum`] solves for `s`. [`perturbation`] provides closed-form
//! expansions in the deformation used as independent oracles.

// `!(x > y)` comparisons deliberately treat NaN as failing the bound.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod chebyshev;
pub mod cli;
pub mod deformation;
pub mod error;
pub mod kinematics;
pub mod perturbation;
pub mod quadrature;
pub mod roots;
pub mod spectrum;
pub mod wavefunction;

pub use error::{Error, Result};
