//! Exact symbolic workbench for semifree cdgas over ℚ: cotangent complexes,
//! truncated de Rham calculus, shifted symplectic forms and their Darboux
//! normal form.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod cohom;
pub mod corpus;
pub mod cotangent;
pub mod darboux;
pub mod derham;
pub mod dgmod;
pub mod gca;
pub mod linalg;
pub mod report;
pub mod shifted;
pub mod witt;

pub use error::{Error, Result};

/// Rational scalars used throughout.
pub type Q = num::BigRational;
