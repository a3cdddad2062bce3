//! Cone parameter bundle and validation.

use super::ConeError;
use crate::channels::KrausMap;
use crate::matfun::{svec_len, CMat};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeVariant {
    /// Point `(u, ρ, σ)`; the pinching argument is an independent variable.
    True,
    /// Point `(u, ρ)`; the pinching argument is `Ẑ𝒢(ρ)`.
    Fast,
}

/// Parameters of one RényiQKD / FastRényiQKD cone.
///
/// `zhat` and `s_blocks` are indexed by the blocks of the lifted space `Z`:
/// for the true variant block `j` maps the `j`-th σ-block, for the fast
/// variant every block consumes `ρ` itself. The stacked `S` with block rows
/// `S_j` must satisfy `S†S = 1` on the reduced `Ĝ` codomain.
#[derive(Debug, Clone)]
pub struct ReducedConeSpec<T: Real> {
    pub alpha: T,
    pub variant: ConeVariant,
    pub ghat: KrausMap<T>,
    pub zhat: Vec<KrausMap<T>>,
    pub s_blocks: Vec<CMat<T>>,
}

impl<T: Real> ReducedConeSpec<T> {
    pub fn new(
        alpha: T,
        variant: ConeVariant,
        ghat: KrausMap<T>,
        zhat: Vec<KrausMap<T>>,
        s_blocks: Vec<CMat<T>>,
    ) -> Result<Self, ConeError> {
        let spec = ReducedConeSpec { alpha, variant, ghat, zhat, s_blocks };
        spec.validate()?;
        Ok(spec)
    }

    /// Side dimension of the ρ slot.
    pub fn q_dim(&self) -> usize {
        self.ghat.in_dim()
    }

    /// Side dimension of the reduced `Ĝ` codomain.
    pub fn k_dim(&self) -> usize {
        self.ghat.out_dim()
    }

    /// Side dimensions of the σ blocks (true variant; empty for fast).
    pub fn sigma_dims(&self) -> Vec<usize> {
        match self.variant {
            ConeVariant::True => self.zhat.iter().map(|m| m.in_dim()).collect(),
            ConeVariant::Fast => Vec::new(),
        }
    }

    /// Side dimensions of the lifted `Z` blocks.
    pub fn z_dims(&self) -> Vec<usize> {
        self.zhat.iter().map(|m| m.out_dim()).collect()
    }

    /// Barrier parameter: `1 + q + Σ m_j` for the true variant, `1 + q` fast.
    pub fn nu(&self) -> T {
        let m: usize = self.sigma_dims().iter().sum();
        T::from_usize(1 + self.q_dim() + m).unwrap()
    }

    /// Real coordinate count of a cone point `(u, svec ρ, svec σ...)`.
    pub fn coord_dim(&self) -> usize {
        let sig: usize = self.sigma_dims().iter().map(|&d| svec_len(d)).sum();
        1 + svec_len(self.q_dim()) + sig
    }

    pub fn s_alpha(&self) -> T {
        -T::one()
    }

    pub fn validate(&self) -> Result<(), ConeError> {
        let half = T::of(0.5);
        if !(self.alpha >= half && self.alpha < T::one()) {
            return Err(ConeError::AlphaOutOfRange(self.alpha.to_f64().unwrap_or(f64::NAN)));
        }
        if self.zhat.is_empty() || self.zhat.len() != self.s_blocks.len() {
            return Err(ConeError::Inconsistent(format!(
                "{} pinching blocks vs {} S blocks",
                self.zhat.len(),
                self.s_blocks.len()
            )));
        }
        let k = self.k_dim();
        for (j, (z, s)) in self.zhat.iter().zip(self.s_blocks.iter()).enumerate() {
            if s.cols() != k || s.rows() != z.out_dim() {
                return Err(ConeError::Inconsistent(format!(
                    "S block {} is {}x{}, expected {}x{}",
                    j,
                    s.rows(),
                    s.cols(),
                    z.out_dim(),
                    k
                )));
            }
            if matches!(self.variant, ConeVariant::Fast) && z.in_dim() != self.q_dim() {
                return Err(ConeError::Inconsistent(format!(
                    "fast-variant pinching block {} consumes dim {}, expected {}",
                    j,
                    z.in_dim(),
                    self.q_dim()
                )));
            }
        }
        // S†S = Σ_j S_j† S_j = 1.
        let mut gram = CMat::<T>::zeros(k, k);
        for s in &self.s_blocks {
            gram = gram.add(&s.adjoint_mul(s));
        }
        let defect = gram.sub(&CMat::identity(k)).max_abs();
        if defect > T::of(1e-8) {
            return Err(ConeError::NotIsometry(defect.to_f64().unwrap_or(f64::NAN)));
        }
        if !self.ghat.is_strictly_positive()? {
            return Err(ConeError::NotStrictlyPositive { block: usize::MAX });
        }
        for (j, z) in self.zhat.iter().enumerate() {
            if !z.is_strictly_positive()? {
                return Err(ConeError::NotStrictlyPositive { block: j });
            }
        }
        Ok(())
    }
}
