//! Barrier oracles for the RényiQKD and FastRényiQKD cones.
//!
//! A cone instance is parameterized by a reduced key map `Ĝ`, reduced pinching
//! data `Ẑ` (or `Ẑ𝒢` for the fast variant), and an isometry `S` linking their
//! codomains. Points are `(u, ρ, σ)` for the true variant and `(u, ρ)` for the
//! fast one; the interior is `ρ ≻ 0`, `σ ≻ 0`, `u − s_α Ψ̂ > 0` with
//! `s_α = sign(α−1) = −1` on the implemented range `α ∈ [1/2, 1)`.
//!
//! Matrix slots are block-diagonal: `σ` is a list of Hermitian blocks and the
//! lifted space `Z` decomposes into blocks `Z_j`, with `S` stored as block
//! rows `S_j`. Protocols with pinching structure shrink dramatically under
//! this layout while a single block recovers the dense case.

mod engine;
mod init;
pub mod oracle;
mod spec;
#[cfg(test)]
mod tests;

pub use engine::{psi_hat, ConeDir, ConePoint, PointCache};
pub use init::initial_point;
pub use oracle::RenyiOracle;
pub use spec::{ConeVariant, ReducedConeSpec};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ConeError {
    #[error("cone exponent {0} outside the supported range [1/2, 1)")]
    AlphaOutOfRange(f64),
    #[error("map dimensions are inconsistent: {0}")]
    Inconsistent(String),
    #[error("S is not an isometry (S†S deviates by {0:.3e})")]
    NotIsometry(f64),
    #[error("reduced map is not strictly positive (block {block})")]
    NotStrictlyPositive { block: usize },
    #[error("point is outside the cone interior")]
    NotInterior,
    #[error(transparent)]
    Mat(#[from] crate::matfun::MatError),
    #[error(transparent)]
    Channel(#[from] crate::channels::ChannelError),
}
