//! Exact symbolic engine for twisted Hamiltonian extended affine Lie algebras
//! `tau = LT + Z/K(m) + H_n(m)` built from a simple Lie algebra and commuting
//! finite-order automorphisms.

pub mod checks;
pub mod config;
pub mod error;
pub mod expr;
pub mod lattice;
pub mod linalg;
pub mod repr;
pub mod sample;
pub mod scalar;
pub mod serial;
pub mod simple_lie;
pub mod structure;
pub mod tau;

pub use error::{Error, Result};
