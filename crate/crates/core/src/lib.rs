//! Fuzzy line bundles over the fuzzy sphere.
//!
//! Builds the SU(2)-equivariant projectors onto `[N ± nu]` inside
//! `[N] ⊗ [nu]`, the derivation-based differential calculus on the matrix
//! algebra `A_N`, and the Chern character of the resulting projective modules,
//! together with the closed-form charges they reproduce.

pub mod binomial;
pub mod calculus;
pub mod chern;
pub mod error;
pub mod linalg;
pub mod projector;
pub mod spin;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use spin::{Branch, TwoJ};
