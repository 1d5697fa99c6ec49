use thiserror::Error;

use crate::spin::Branch;

#[derive(Debug, Error)]
pub enum Error {
    #[error("branch {branch} requires N > nu (got two_n = {two_n}, two_nu = {two_nu})")]
    BranchDomain {
        branch: Branch,
        two_n: u32,
        two_nu: u32,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("basis two-form is zero")]
    ZeroBasis,

    #[error("lowering chain broke down after {collected} of {expected} vectors (norm {norm:e})")]
    NumericalBreakdown {
        collected: usize,
        expected: usize,
        norm: f64,
    },

    #[error("expected a real value, imaginary part {0:e} exceeds tolerance")]
    NonRealResult(f64),

    #[error("highest-weight vector branch {vector} does not match projector branch {projector}")]
    BranchMismatch { vector: Branch, projector: Branch },

    #[error("element is not in the projective module: |psi p - psi| = {0:e}")]
    ModuleMembership(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
