//! Finite-size quantum key distribution rates from sandwiched Rényi entropies
//! via non-symmetric conic optimization.
//!
//! The crate stacks up as follows:
//!
//! - [`matfun`]: Hermitian linear algebra, spectral functions, divided
//!   differences, Fréchet derivatives up to third order.
//! - [`channels`]: completely positive maps as Kraus collections and the
//!   facial-reduction machinery producing strictly positive reduced maps.
//! - [`renyicones`]: barrier oracles for the RényiQKD and FastRényiQKD cones
//!   (value, gradient, Hessian, third-order directional derivative, initial
//!   point, membership).
//! - [`stdcones`]: the standard cones the conic formulations also need
//!   (nonnegative orthant, PSD, vector relative entropy, logarithm) plus the
//!   L1-ball reformulation.
//! - [`ipm`]: a primal-dual interior-point solver over products of cones
//!   defined only through their barrier oracles, using a homogeneous
//!   self-dual embedding with third-order-corrected predictor steps.
//! - [`protocols`]: BB84, MUB, and DMCV instance builders (observables,
//!   honest statistics, cone blueprints, sifting, conditional entropies).
//! - [`keyrate`]: the finite-size pipeline (statistical margin, error
//!   correction leak, conic program assembly, key length, parameter sweeps).
//! - [`oracles`]: independent verification oracles used by tests and the
//!   acceptance suite (finite differences, support-restricted divergence
//!   evaluation, phase-space quadrature, a first-order baseline optimizer).
//!
//! Every numeric kernel is generic over a real scalar (see [`scalar::Real`]);
//! `f64` is the default used by the concrete aliases below.

pub mod channels;
pub mod ipm;
pub mod keyrate;
pub mod matfun;
pub mod oracles;
pub mod protocols;
pub mod renyicones;
pub mod scalar;
pub mod stdcones;

pub use scalar::Real;

/// Default real scalar.
pub type F = f64;

/// Concrete aliases over the default scalar.
pub type CMatF = matfun::CMat<F>;
pub type HermitianMatrixF = matfun::HermitianMatrix<F>;
pub type KrausMapF = channels::KrausMap<F>;
