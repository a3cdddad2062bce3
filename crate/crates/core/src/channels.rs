//! Completely positive maps as Kraus collections, their adjoints and
//! compositions, and facial reduction onto strictly positive maps.

use crate::matfun::{eigh, CMat, MatError};
use crate::scalar::{cre, Real};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ChannelError {
    #[error("kraus operators disagree in shape")]
    InconsistentKraus,
    #[error("input dimension mismatch: map expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("map is numerically zero; no support isometry exists")]
    ZeroMap,
    #[error("support containment violated: S†S deviates from identity by {deviation:.3e}")]
    SupportContainment { deviation: f64 },
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Relative eigenvalue cutoff separating structural zeros of `Φ(1)` from
/// round-off.
pub fn support_cutoff<T: Real>() -> T {
    T::of(1e-9)
}

/// Completely positive map `Φ(X) = Σᵢ Kᵢ X Kᵢ†`.
#[derive(Debug, Clone)]
pub struct KrausMap<T: Real> {
    kraus: Vec<CMat<T>>,
    in_dim: usize,
    out_dim: usize,
}

impl<T: Real> KrausMap<T> {
    pub fn new(kraus: Vec<CMat<T>>) -> Result<Self, ChannelError> {
        let first = kraus.first().ok_or(ChannelError::InconsistentKraus)?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != out_dim || k.cols() != in_dim) {
            return Err(ChannelError::InconsistentKraus);
        }
        Ok(KrausMap { kraus, in_dim, out_dim })
    }

    pub fn identity(n: usize) -> Self {
        KrausMap { kraus: vec![CMat::identity(n)], in_dim: n, out_dim: n }
    }

    /// Single-Kraus map `X ↦ K X K†`.
    pub fn conjugation(k: CMat<T>) -> Self {
        let (out_dim, in_dim) = (k.rows(), k.cols());
        KrausMap { kraus: vec![k], in_dim, out_dim }
    }

    pub fn kraus(&self) -> &[CMat<T>] {
        &self.kraus
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// `Φ(X)`.
    pub fn apply(&self, x: &CMat<T>) -> Result<CMat<T>, ChannelError> {
        if x.rows() != self.in_dim || x.cols() != self.in_dim {
            return Err(ChannelError::DimensionMismatch { expected: self.in_dim, got: x.rows() });
        }
        let mut out = CMat::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out = out.add(&x.congruence(k));
        }
        Ok(out)
    }

    /// `Φ†(Y) = Σᵢ Kᵢ† Y Kᵢ`, the Hilbert-Schmidt adjoint.
    pub fn adjoint_apply(&self, y: &CMat<T>) -> Result<CMat<T>, ChannelError> {
        if y.rows() != self.out_dim || y.cols() != self.out_dim {
            return Err(ChannelError::DimensionMismatch { expected: self.out_dim, got: y.rows() });
        }
        let mut out = CMat::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            out = out.add(&y.congruence_adjoint(k));
        }
        Ok(out)
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &KrausMap<T>) -> Result<KrausMap<T>, ChannelError> {
        if other.out_dim != self.in_dim {
            return Err(ChannelError::DimensionMismatch { expected: self.in_dim, got: other.out_dim });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.mul(b));
            }
        }
        KrausMap::new(kraus)
    }

    /// `Φ(1)`, whose support determines the facial reduction.
    pub fn apply_identity(&self) -> CMat<T> {
        self.apply(&CMat::identity(self.in_dim)).expect("identity has the input dimension")
    }

    /// Strict positivity: a CP map sends positive definite inputs to positive
    /// definite outputs exactly when `Φ(1) ≻ 0`.
    pub fn is_strictly_positive(&self) -> Result<bool, ChannelError> {
        let sd = eigh(&self.apply_identity())?;
        let cutoff = support_cutoff::<T>() * sd.max_eigenvalue().max(T::zero());
        Ok(sd.min_eigenvalue() > cutoff)
    }

    /// Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` (input index outermost).
    pub fn choi_matrix(&self) -> CMat<T> {
        let (din, dout) = (self.in_dim, self.out_dim);
        let mut choi = CMat::zeros(din * dout, din * dout);
        for k in &self.kraus {
            // vec(K): Choi = Σ vec(K) vec(K)† with vec(K)[i*dout + a] = K[a, i].
            let mut v = vec![crate::scalar::czero::<T>(); din * dout];
            for a in 0..dout {
                for i in 0..din {
                    v[i * dout + a] = k[(a, i)];
                }
            }
            for p in 0..din * dout {
                for q in 0..din * dout {
                    choi[(p, q)] = choi[(p, q)] + v[p] * v[q].conj();
                }
            }
        }
        choi
    }

    /// Recover a Kraus representation from a Choi matrix (convenience
    /// converter; eigenvectors above the cutoff become Kraus operators).
    pub fn from_choi(choi: &CMat<T>, in_dim: usize, out_dim: usize) -> Result<Self, ChannelError> {
        if choi.rows() != in_dim * out_dim {
            return Err(ChannelError::DimensionMismatch {
                expected: in_dim * out_dim,
                got: choi.rows(),
            });
        }
        let sd = eigh(choi)?;
        let cutoff = support_cutoff::<T>() * sd.max_eigenvalue().max(T::zero());
        let mut kraus = Vec::new();
        for (idx, &lam) in sd.eigenvalues.iter().enumerate() {
            if lam <= cutoff {
                continue;
            }
            let s = lam.sqrt();
            let mut k = CMat::zeros(out_dim, in_dim);
            for i in 0..in_dim {
                for a in 0..out_dim {
                    k[(a, i)] = sd.unitary[(i * out_dim + a, idx)] * cre(s);
                }
            }
            kraus.push(k);
        }
        if kraus.is_empty() {
            return Err(ChannelError::ZeroMap);
        }
        KrausMap::new(kraus)
    }
}

/// Isometry whose columns span the support of `Φ(1)`.
///
/// Eigenvalues below `support_cutoff · λ_max` count as structural zeros.
pub fn support_isometry<T: Real>(map: &KrausMap<T>) -> Result<CMat<T>, ChannelError> {
    let phi1 = map.apply_identity();
    let sd = eigh(&phi1)?;
    let lmax = sd.max_eigenvalue();
    if !(lmax > T::zero()) {
        return Err(ChannelError::ZeroMap);
    }
    let cutoff = support_cutoff::<T>() * lmax;
    let m = map.out_dim();
    let keep: Vec<usize> = (0..m).filter(|&i| sd.eigenvalues[i] > cutoff).collect();
    if keep.is_empty() {
        return Err(ChannelError::ZeroMap);
    }
    let mut w = CMat::zeros(m, keep.len());
    for (col, &src) in keep.iter().enumerate() {
        for r in 0..m {
            w[(r, col)] = sd.unitary[(r, src)];
        }
    }
    Ok(w)
}

/// A strictly positive reduced map together with the isometry realizing
/// `Φ(X) = W Φ̂(X) W†`.
#[derive(Debug, Clone)]
pub struct FacialReduction<T: Real> {
    pub reduced_map: KrausMap<T>,
    pub isometry_w: CMat<T>,
    pub reduced_dim: usize,
}

impl<T: Real> FacialReduction<T> {
    pub fn of(map: &KrausMap<T>) -> Result<Self, ChannelError> {
        let w = support_isometry(map)?;
        let k = w.cols();
        let kraus = map.kraus().iter().map(|ki| w.adjoint_mul(ki)).collect();
        Ok(FacialReduction { reduced_map: KrausMap::new(kraus)?, isometry_w: w, reduced_dim: k })
    }
}

/// Isometry linking two reduced codomains, `S = W_Z† W_G`.
#[derive(Debug, Clone)]
pub struct IsometryS<T: Real> {
    pub matrix: CMat<T>,
}

impl<T: Real> IsometryS<T> {
    /// Largest deviation of `S†S` from the identity.
    pub fn isometry_defect(&self) -> T {
        let gram = self.matrix.adjoint_mul(&self.matrix);
        gram.sub(&CMat::identity(self.matrix.cols())).max_abs()
    }
}

/// Facially reduce a key-map/pinching-map pair: produce strictly positive
/// `Ĝ`, `Ẑ` and the isometry `S = W_Z† W_G`.
///
/// Errors when the support of `g` is not contained in the support of `z`
/// (detected through `S†S` deviating from the identity), which indicates a
/// modeling mistake in the protocol construction.
pub fn facially_reduce_pair<T: Real>(
    g: &KrausMap<T>,
    z: &KrausMap<T>,
) -> Result<(FacialReduction<T>, FacialReduction<T>, IsometryS<T>), ChannelError> {
    if g.out_dim() != z.out_dim() {
        return Err(ChannelError::DimensionMismatch { expected: g.out_dim(), got: z.out_dim() });
    }
    let ghat = FacialReduction::of(g)?;
    let zhat = FacialReduction::of(z)?;
    let s = IsometryS { matrix: zhat.isometry_w.adjoint_mul(&ghat.isometry_w) };
    let defect = s.isometry_defect();
    if defect > T::of(1e-8) {
        return Err(ChannelError::SupportContainment { deviation: defect.to_f64().unwrap_or(f64::NAN) });
    }
    Ok((ghat, zhat, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::HermitianMatrix;
    use num_complex::Complex;

    fn rng_stream(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed;
        move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        }
    }

    fn rng_mat(r: usize, c: usize, seed: u64) -> CMat<f64> {
        let mut next = rng_stream(seed);
        CMat::from_fn(r, c, |_, _| Complex::new(next(), next()))
    }

    fn rng_psd(n: usize, seed: u64, floor: f64) -> CMat<f64> {
        let a = rng_mat(n, n, seed);
        let mut m = a.mul_adjoint(&a);
        for i in 0..n {
            m[(i, i)] = m[(i, i)] + Complex::new(floor, 0.0);
        }
        m.herm_part()
    }

    #[test]
    fn identity_map_and_isometry_trace() {
        let x = rng_psd(3, 1, 0.2);
        let id = KrausMap::identity(3);
        assert!(id.apply(&x).unwrap().sub(&x).max_abs() < 1e-14);

        // Isometry 5x3 preserves trace of PSD inputs.
        let raw = rng_mat(5, 3, 2);
        // Orthonormalize columns.
        let mut cols: Vec<Vec<Complex<f64>>> = (0..3)
            .map(|j| (0..5).map(|i| raw[(i, j)]).collect())
            .collect();
        for j in 0..3 {
            for k in 0..j {
                let mut ip = Complex::new(0.0, 0.0);
                for i in 0..5 {
                    ip += cols[k][i].conj() * cols[j][i];
                }
                for i in 0..5 {
                    let ck = cols[k][i];
                    cols[j][i] -= ip * ck;
                }
            }
            let nrm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for i in 0..5 {
                cols[j][i] /= Complex::new(nrm, 0.0);
            }
        }
        let v = CMat::from_fn(5, 3, |i, j| cols[j][i]);
        let iso = KrausMap::conjugation(v);
        let y = iso.apply(&x).unwrap();
        assert!((y.trace().re - x.trace().re).abs() < 1e-12);
    }

    #[test]
    fn pinching_produces_blocks() {
        // Pinching {|r><r| ⊗ 1} on a 2x3-structured space zeroes off-blocks.
        let d_r = 2;
        let d_b = 3;
        let mut kraus = Vec::new();
        for r in 0..d_r {
            let mut p = CMat::<f64>::zeros(d_r, d_r);
            p[(r, r)] = Complex::new(1.0, 0.0);
            kraus.push(p.kron(&CMat::identity(d_b)));
        }
        let pinch = KrausMap::new(kraus).unwrap();
        let rho = rng_psd(d_r * d_b, 9, 0.1);
        let out = pinch.apply(&rho).unwrap();
        for i in 0..d_b {
            for j in 0..d_b {
                assert!(out[(i, d_b + j)].norm() < 1e-14);
                let d = out[(i, j)] - rho[(i, j)];
                assert!(d.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn adjoint_duality_and_unital() {
        let kraus = vec![rng_mat(4, 3, 11), rng_mat(4, 3, 12)];
        let map = KrausMap::new(kraus).unwrap();
        for s in 0..10u64 {
            let x = rng_psd(3, 100 + s, 0.0);
            let y = rng_psd(4, 200 + s, 0.0);
            let lhs = map.apply(&x).unwrap().hs_inner(&y).re;
            let rhs = x.hs_inner(&map.adjoint_apply(&y).unwrap()).re;
            assert!((lhs - rhs).abs() < 1e-11 * lhs.abs().max(1.0));
        }

        // A trace-preserving map has unital adjoint.
        let k0 = CMat::<f64>::from_rows_f64(2, 2, &[(0.6, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let k1 = CMat::<f64>::from_rows_f64(2, 2, &[(0.0, 0.0), (0.0, 0.0), (0.8, 0.0), (0.0, 0.0)]);
        let tp = KrausMap::new(vec![k0, k1]).unwrap();
        let sum = tp.adjoint_apply(&CMat::identity(2)).unwrap();
        assert!(sum.sub(&CMat::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn support_isometry_cases() {
        // Strictly positive map: W is square.
        let map = KrausMap::new(vec![rng_mat(3, 3, 21), CMat::identity(3).scale_re(0.3)]).unwrap();
        let w = support_isometry(&map).unwrap();
        assert_eq!(w.cols(), 3);

        // Rank-one map |0><0|.
        let mut k = CMat::<f64>::zeros(3, 3);
        k[(0, 0)] = Complex::new(1.0, 0.0);
        let proj = KrausMap::conjugation(k);
        let w = support_isometry(&proj).unwrap();
        assert_eq!(w.cols(), 1);
        assert!((w[(0, 0)].norm() - 1.0).abs() < 1e-12);

        let zero = KrausMap::conjugation(CMat::<f64>::zeros(3, 3));
        assert!(matches!(support_isometry(&zero), Err(ChannelError::ZeroMap)));
    }

    #[test]
    fn facial_reduction_reconstructs() {
        // A map with deliberately deficient support: embed a 2-dim output in 4 dims.
        let embed = rng_mat(2, 3, 31);
        let mut k = CMat::<f64>::zeros(4, 3);
        for i in 0..2 {
            for j in 0..3 {
                k[(i, j)] = embed[(i, j)];
            }
        }
        let map = KrausMap::conjugation(k);
        let fr = FacialReduction::of(&map).unwrap();
        assert_eq!(fr.reduced_dim, 2);
        let gram = fr.isometry_w.adjoint_mul(&fr.isometry_w);
        assert!(gram.sub(&CMat::identity(2)).max_abs() < 1e-12);
        assert!(fr.reduced_map.is_strictly_positive().unwrap());
        for s in 0..20u64 {
            let x = rng_psd(3, 300 + s, 0.05);
            let direct = map.apply(&x).unwrap();
            let lifted = fr.reduced_map.apply(&x).unwrap().congruence(&fr.isometry_w);
            let rel = direct.sub(&lifted).max_abs() / direct.max_abs().max(1.0);
            assert!(rel < 1e-10);
        }
    }

    #[test]
    fn reduce_pair_random_strictly_positive() {
        // Strictly positive G, Z on the same space: the reduction is a change of basis.
        let g = KrausMap::new(vec![rng_mat(3, 3, 41), CMat::identity(3).scale_re(0.4)]).unwrap();
        let z = KrausMap::new(vec![rng_mat(3, 3, 42), CMat::identity(3).scale_re(0.5)]).unwrap();
        let (ghat, zhat, s) = facially_reduce_pair(&g, &z).unwrap();
        assert_eq!(ghat.reduced_dim, 3);
        assert_eq!(zhat.reduced_dim, 3);
        assert!(s.isometry_defect() < 1e-12);
        assert!(ghat.reduced_map.is_strictly_positive().unwrap());
        assert!(zhat.reduced_map.is_strictly_positive().unwrap());
    }

    #[test]
    fn support_violation_detected() {
        // G's support sticks out of Z's: Z acts only on the 0-block.
        let mut kz = CMat::<f64>::zeros(3, 3);
        kz[(0, 0)] = Complex::new(1.0, 0.0);
        let z = KrausMap::conjugation(kz);
        let g = KrausMap::identity(3);
        assert!(matches!(
            facially_reduce_pair(&g, &z),
            Err(ChannelError::SupportContainment { .. })
        ));
    }

    #[test]
    fn choi_round_trip() {
        let map = KrausMap::new(vec![rng_mat(3, 2, 51), rng_mat(3, 2, 52)]).unwrap();
        let choi = map.choi_matrix();
        let back = KrausMap::from_choi(&choi, 2, 3).unwrap();
        for s in 0..5u64 {
            let x = rng_psd(2, 500 + s, 0.1);
            let a = map.apply(&x).unwrap();
            let b = back.apply(&x).unwrap();
            assert!(a.sub(&b).max_abs() < 1e-10 * a.max_abs().max(1.0));
        }
        let _ = HermitianMatrix::new(choi).unwrap();
    }
}
