//! Hermitian linear algebra, spectral functions, divided differences, and
//! Fréchet derivatives up to third order.
//!
//! This layer is the numeric substrate for every barrier derivative in the
//! crate. All values are immutable after construction and safe to share
//! between threads; operations are pure functions.

pub mod cmat;
pub mod dd;
pub mod frechet;
pub mod herm;
pub mod vecz;

pub use cmat::CMat;
pub use dd::{dd2, dd3, divided_differences, Dd1Table, Dd2Table, DdTable, LnFn, PowerFn, ScalarFn};
pub use frechet::{frechet_derivative, spectral_apply};
pub use herm::{eigh, HermitianMatrix, SpectralDecomposition};
pub use vecz::{svec, svec_blocks, svec_into, svec_len, svec_len_blocks, unsvec, unsvec_blocks};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum MatError {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("eigenvalue iteration failed to converge")]
    EigNonConvergence,
    #[error("eigenvalue {eigenvalue:.6e} lies outside the scalar function's domain")]
    DomainViolation { eigenvalue: f64 },
    #[error("unsupported derivative order {0} (expected 1..=3)")]
    BadOrder(u8),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}
