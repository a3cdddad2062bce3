//! Solver-facing oracle wrapper over the cone engine.
//!
//! Coordinates: `[u, svec(ρ), svec(σ_1), …]`.

use super::engine::{psi_hat, ConeDir, ConePoint, PointCache};
use super::init::initial_point;
use super::spec::{ConeVariant, ReducedConeSpec};
use crate::ipm::cone::BarrierOracle;
use crate::matfun::{svec_into, svec_len, unsvec, unsvec_blocks, CMat};
use crate::scalar::Real;

pub struct RenyiOracle<T: Real> {
    spec: ReducedConeSpec<T>,
    sigma_dims: Vec<usize>,
    cache: Option<PointCache<T>>,
}

impl<T: Real> RenyiOracle<T> {
    pub fn new(spec: ReducedConeSpec<T>) -> Self {
        let sigma_dims = spec.sigma_dims();
        RenyiOracle { spec, sigma_dims, cache: None }
    }

    fn decode(&self, x: &[T]) -> ConePoint<T> {
        let q = self.spec.q_dim();
        let rho = unsvec(&x[1..1 + svec_len(q)], q);
        let sigma = if self.sigma_dims.is_empty() {
            Vec::new()
        } else {
            unsvec_blocks(&x[1 + svec_len(q)..], &self.sigma_dims)
        };
        ConePoint { u: x[0], rho, sigma }
    }

    fn encode(&self, dir: &ConeDir<T>, out: &mut [T]) {
        out[0] = dir.du;
        let q = self.spec.q_dim();
        svec_into(&dir.drho, &mut out[1..1 + svec_len(q)]);
        let mut off = 1 + svec_len(q);
        for s in &dir.dsigma {
            let len = svec_len(s.rows());
            svec_into(s, &mut out[off..off + len]);
            off += len;
        }
    }

    fn cache(&self) -> &PointCache<T> {
        self.cache.as_ref().expect("set_point must be called before derivative queries")
    }
}

impl<T: Real> BarrierOracle<T> for RenyiOracle<T> {
    fn dim(&self) -> usize {
        self.spec.coord_dim()
    }

    fn nu(&self) -> T {
        self.spec.nu()
    }

    fn initial_point(&self, out: &mut [T]) {
        let p = initial_point(&self.spec);
        let dir = ConeDir { du: p.u, drho: p.rho, dsigma: p.sigma };
        self.encode(&dir, out);
    }

    fn is_interior(&self, x: &[T]) -> bool {
        let p = self.decode(x);
        match psi_hat(&self.spec, &p.rho, &p.sigma) {
            Ok(psi) => p.u - self.spec.s_alpha() * psi > T::zero(),
            Err(_) => false,
        }
    }

    fn set_point(&mut self, x: &[T]) -> bool {
        let p = self.decode(x);
        match PointCache::build(&self.spec, p) {
            Ok(Some(c)) => {
                self.cache = Some(c);
                true
            }
            _ => false,
        }
    }

    fn value(&self) -> T {
        self.cache().barrier()
    }

    fn gradient(&self, out: &mut [T]) {
        let g = self.cache().gradient();
        self.encode(&g, out);
    }

    fn hess_apply(&self, h: &[T], out: &mut [T]) {
        let dir = self.decode_dir(h);
        let r = self.cache().hess_apply(&self.spec, &dir).expect("hessian at cached interior point");
        self.encode(&r, out);
    }

    fn third_dir(&self, h: &[T], out: &mut [T]) {
        let dir = self.decode_dir(h);
        let r = self.cache().third_dir(&self.spec, &dir).expect("third order at cached interior point");
        self.encode(&r, out);
    }
}

impl<T: Real> RenyiOracle<T> {
    fn decode_dir(&self, h: &[T]) -> ConeDir<T> {
        let q = self.spec.q_dim();
        let drho = unsvec(&h[1..1 + svec_len(q)], q);
        let dsigma: Vec<CMat<T>> = if self.sigma_dims.is_empty() {
            Vec::new()
        } else {
            unsvec_blocks(&h[1 + svec_len(q)..], &self.sigma_dims)
        };
        ConeDir { du: h[0], drho, dsigma }
    }

    pub fn variant(&self) -> ConeVariant {
        self.spec.variant
    }
}
