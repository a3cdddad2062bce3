//! Interior starting points for both cone variants.
//!
//! With unital reduced maps the multiple-of-identity ansatz solves the
//! central-point condition `x = -∇f(x)` exactly; otherwise it still lands in
//! the interior because `u` is set from the actually evaluated Ψ̂.

use super::engine::{ConePoint, PointCache};
use super::spec::{ConeVariant, ReducedConeSpec};
use crate::matfun::CMat;
use crate::scalar::Real;

/// `u` solving `u = 1/(u - s Ψ)` on the interior side:
/// `u = s Ψ/2 + sqrt(1 + Ψ²/4)`.
fn u_from_psi<T: Real>(s: T, psi: T) -> T {
    s * psi * T::of(0.5) + (T::one() + psi * psi * T::of(0.25)).sqrt()
}

/// Scale for the fast-variant identity ansatz,
/// `γ = sqrt((d+3)/(2d+2) − (s/2) sqrt(1 + 4/(d+1)²))` with `d = q`.
pub(crate) fn fast_gamma<T: Real>(s: T, d: usize) -> T {
    let d = T::from_usize(d).unwrap();
    let one = T::one();
    let two = T::of(2.0);
    let inner = (one + T::of(4.0) / ((d + one) * (d + one))).sqrt();
    ((d + T::of(3.0)) / (two * d + two) - s * T::of(0.5) * inner).sqrt()
}

/// Solve the true-variant central-point system for (γ, δ) under unitality:
/// with t = γ²−1 and δ² = 1 + (1−α) t / α,
/// `t² (1+t)^{-α} (δ²)^{α-1} + q α t − α² = 0`.
fn true_gammas<T: Real>(alpha: T, q: usize) -> Option<(T, T)> {
    let a = alpha;
    let dq = T::from_usize(q).unwrap();
    let phi = |t: T| -> T {
        let d2 = T::one() + (T::one() - a) * t / a;
        t * t * (T::one() + t).powf(-a) * d2.powf(a - T::one()) + dq * a * t - a * a
    };
    // φ(0) = −α² < 0 and φ grows linearly; bracket then bisect with a secant
    // polish. 100 iterations cap.
    let mut lo = T::zero();
    let mut hi = T::one();
    let mut expand = 0;
    while phi(hi) < T::zero() {
        hi = hi * T::of(2.0);
        expand += 1;
        if expand > 60 {
            return None;
        }
    }
    let mut iters = 0;
    while iters < 100 {
        let mid = (lo + hi) * T::of(0.5);
        let v = phi(mid);
        if v.abs() < T::of(1e-14) {
            lo = mid;
            hi = mid;
            break;
        }
        if v < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    let t = (lo + hi) * T::of(0.5);
    if !(t.is_finite() && t > -T::one()) {
        return None;
    }
    let gamma = (T::one() + t).sqrt();
    let delta2 = T::one() + (T::one() - a) * t / a;
    if !(delta2 > T::zero()) {
        return None;
    }
    Some((gamma, delta2.sqrt()))
}

/// An interior point of the cone; the exact central point when the reduced
/// maps and their adjoints are unital. Never fails: on any numerical trouble
/// it falls back to the unit-identity ansatz, which is interior by the choice
/// of `u`.
pub fn initial_point<T: Real>(spec: &ReducedConeSpec<T>) -> ConePoint<T> {
    let s = spec.s_alpha();
    let q = spec.q_dim();
    let (gamma, delta) = match spec.variant {
        ConeVariant::Fast => (fast_gamma(s, q), T::one()),
        ConeVariant::True => true_gammas(spec.alpha, q).unwrap_or((T::one(), T::one())),
    };
    let build = |g: T, d: T| -> ConePoint<T> {
        let rho = CMat::identity(q).scale_re(g);
        let sigma = match spec.variant {
            ConeVariant::Fast => Vec::new(),
            ConeVariant::True => spec
                .sigma_dims()
                .iter()
                .map(|&m| CMat::identity(m).scale_re(d))
                .collect(),
        };
        let mut point = ConePoint { u: T::zero(), rho, sigma };
        let psi = super::engine::psi_hat(spec, &point.rho, &point.sigma).unwrap_or(T::one());
        point.u = u_from_psi(s, psi);
        point
    };
    let candidate = build(gamma, delta);
    match PointCache::build(spec, candidate.clone()) {
        Ok(Some(_)) => candidate,
        _ => build(T::one(), T::one()),
    }
}
