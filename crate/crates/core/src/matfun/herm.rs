//! Hermitian matrices and their spectral decompositions.
//!
//! The eigensolver reduces a complex Hermitian matrix to real symmetric
//! tridiagonal form with Householder reflections, then runs implicit-shift QL
//! sweeps. Eigenvalues come back ascending so downstream caching and tests see
//! a deterministic order.

use super::cmat::CMat;
use super::MatError;
use crate::scalar::{cre, czero, Real, C};
use num_complex::Complex;
use std::sync::OnceLock;

/// Eigendecomposition `X = U diag(λ) U†` with `λ` ascending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    pub eigenvalues: Vec<T>,
    pub unitary: CMat<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(λ)) U†`.
    pub fn apply_values(&self, values: &[T]) -> CMat<T> {
        let n = self.dim();
        debug_assert_eq!(values.len(), n);
        let u = &self.unitary;
        // U * diag(v) then * U†
        let mut scaled = u.clone();
        for i in 0..n {
            let row = scaled.row_mut(i);
            for (j, &v) in values.iter().enumerate() {
                row[j] = row[j] * cre(v);
            }
        }
        scaled.mul_adjoint(u)
    }

    pub fn reconstruct(&self) -> CMat<T> {
        self.apply_values(&self.eigenvalues)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues[self.dim() - 1]
    }
}

/// Eigendecomposition of a complex Hermitian matrix.
///
/// Only the Hermitian part of the input is consulted.
pub fn eigh<T: Real>(a: &CMat<T>) -> Result<SpectralDecomposition<T>, MatError> {
    if !a.is_square() {
        return Err(MatError::NotSquare(a.rows(), a.cols()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(SpectralDecomposition { eigenvalues: vec![], unitary: CMat::zeros(0, 0) });
    }
    let mut m = a.herm_part();
    let mut q = CMat::<T>::identity(n);

    // Householder reduction to Hermitian tridiagonal form.
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let mut xnorm_sq = T::zero();
        for i in 0..len {
            xnorm_sq = xnorm_sq + m[(k + 1 + i, k)].norm_sqr();
        }
        let xnorm = xnorm_sq.sqrt();
        if xnorm <= T::epsilon() * m.max_abs().max(T::one()) * T::of(1e-4) {
            continue;
        }
        let alpha = m[(k + 1, k)];
        let phase = if alpha.norm() > T::zero() {
            alpha / Complex::new(alpha.norm(), T::zero())
        } else {
            Complex::new(T::one(), T::zero())
        };
        // v = x + phase*|x| e1, reflector normal; beta = -phase*|x| lands on the subdiagonal.
        let mut v: Vec<C<T>> = (0..len).map(|i| m[(k + 1 + i, k)]).collect();
        v[0] = v[0] + phase * cre(xnorm);
        let mut vnorm_sq = T::zero();
        for z in v.iter() {
            vnorm_sq = vnorm_sq + z.norm_sqr();
        }
        if vnorm_sq <= T::zero() {
            continue;
        }
        let tau = T::of(2.0) / vnorm_sq;

        // Two-sided Hermitian update of the trailing block:
        // p = tau * A v, kappa = tau/2 * v† p, w = p - kappa v, A <- A - w v† - v w†.
        let mut p = vec![czero::<T>(); len];
        for i in 0..len {
            let mut acc: C<T> = czero();
            let row = m.row(k + 1 + i);
            for j in 0..len {
                acc = acc + row[k + 1 + j] * v[j];
            }
            p[i] = acc * cre(tau);
        }
        let mut vp: C<T> = czero();
        for i in 0..len {
            vp = vp + v[i].conj() * p[i];
        }
        let kappa = vp * cre(tau * T::of(0.5));
        let w: Vec<C<T>> = (0..len).map(|i| p[i] - kappa * v[i]).collect();
        for i in 0..len {
            let wi = w[i];
            let vi = v[i];
            let row = m.row_mut(k + 1 + i);
            for j in 0..len {
                row[k + 1 + j] = row[k + 1 + j] - wi * v[j].conj() - vi * w[j].conj();
            }
        }
        // New column k below the diagonal.
        let beta = -phase * cre(xnorm);
        m[(k + 1, k)] = beta;
        m[(k, k + 1)] = beta.conj();
        for i in 1..len {
            m[(k + 1 + i, k)] = czero();
            m[(k, k + 1 + i)] = czero();
        }
        // Accumulate Q <- Q (I - tau v v†).
        for r in 0..n {
            let row = q.row_mut(r);
            let mut acc: C<T> = czero();
            for j in 0..len {
                acc = acc + row[k + 1 + j] * v[j];
            }
            let acc = acc * cre(tau);
            for j in 0..len {
                row[k + 1 + j] = row[k + 1 + j] - acc * v[j].conj();
            }
        }
    }

    // Strip subdiagonal phases so the tridiagonal matrix is real.
    let mut d: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut e: Vec<T> = vec![T::zero(); n];
    let mut dp = vec![Complex::new(T::one(), T::zero()); n];
    for i in 0..n - 1 {
        let t = m[(i + 1, i)];
        let r = t.norm();
        e[i] = r;
        dp[i + 1] = if r > T::zero() { dp[i] * (t / cre(r)) } else { dp[i] };
    }
    for r in 0..n {
        let row = q.row_mut(r);
        for (j, z) in row.iter_mut().enumerate() {
            *z = *z * dp[j];
        }
    }

    tql2(&mut d, &mut e, &mut q)?;

    // Ascending sort with column permutation.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues: Vec<T> = order.iter().map(|&i| d[i]).collect();
    let mut unitary = CMat::zeros(n, n);
    for r in 0..n {
        let src = q.row(r);
        let dst: Vec<C<T>> = order.iter().map(|&c| src[c]).collect();
        unitary.row_mut(r).copy_from_slice(&dst);
    }
    Ok(SpectralDecomposition { eigenvalues, unitary })
}

/// Implicit-shift QL on a real symmetric tridiagonal, rotating the columns of
/// `q` along. `e` holds subdiagonals in `e[0..n-1]`.
fn tql2<T: Real>(d: &mut [T], e: &mut [T], q: &mut CMat<T>) -> Result<(), MatError> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let eps = T::epsilon();
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(MatError::EigNonConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (T::of(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            let sign_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut i = m;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::of(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let cs = cre::<T>(c);
                let ss = cre::<T>(s);
                for k in 0..q.rows() {
                    let row = q.row_mut(k);
                    f = T::zero();
                    let _ = f;
                    let zi1 = row[i + 1];
                    let zi = row[i];
                    row[i + 1] = ss * zi + cs * zi1;
                    row[i] = cs * zi - ss * zi1;
                }
            }
            if r == T::zero() && i > l {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Dense complex Hermitian matrix with a cached spectral decomposition.
#[derive(Debug)]
pub struct HermitianMatrix<T: Real> {
    mat: CMat<T>,
    hermiticity_tol: T,
    spectral: OnceLock<Result<SpectralDecomposition<T>, MatError>>,
}

impl<T: Real> Clone for HermitianMatrix<T> {
    fn clone(&self) -> Self {
        HermitianMatrix {
            mat: self.mat.clone(),
            hermiticity_tol: self.hermiticity_tol,
            spectral: OnceLock::new(),
        }
    }
}

/// Default relative Hermiticity tolerance.
pub fn default_herm_tol<T: Real>() -> T {
    T::of(1e-12)
}

impl<T: Real> HermitianMatrix<T> {
    /// Validate Hermiticity within `tol` (relative to the largest entry), then
    /// store the symmetrized part so upstream round-off is absorbed.
    pub fn with_tol(mat: CMat<T>, tol: T) -> Result<Self, MatError> {
        if !mat.is_square() {
            return Err(MatError::NotSquare(mat.rows(), mat.cols()));
        }
        if mat.rows() == 0 {
            return Err(MatError::EmptyMatrix);
        }
        let dev = mat.herm_deviation();
        let scale = mat.max_abs().max(T::one());
        if dev > tol * scale {
            return Err(MatError::NotHermitian { deviation: dev.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(HermitianMatrix { mat: mat.herm_part(), hermiticity_tol: tol, spectral: OnceLock::new() })
    }

    pub fn new(mat: CMat<T>) -> Result<Self, MatError> {
        Self::with_tol(mat, default_herm_tol())
    }

    /// Symmetrize without validation; for matrices produced by internal
    /// arithmetic that is Hermitian by construction.
    pub fn symmetrize(mat: CMat<T>) -> Self {
        debug_assert!(mat.is_square());
        HermitianMatrix {
            mat: mat.herm_part(),
            hermiticity_tol: default_herm_tol(),
            spectral: OnceLock::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::symmetrize(CMat::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self::symmetrize(CMat::zeros(n, n))
    }

    pub fn diag(d: &[T]) -> Self {
        Self::symmetrize(CMat::diag(d))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &CMat<T> {
        &self.mat
    }

    pub fn into_mat(self) -> CMat<T> {
        self.mat
    }

    pub fn hermiticity_tol(&self) -> T {
        self.hermiticity_tol
    }

    /// Spectral decomposition, computed once and cached.
    pub fn spectral(&self) -> Result<&SpectralDecomposition<T>, MatError> {
        self.spectral
            .get_or_init(|| eigh(&self.mat))
            .as_ref()
            .map_err(|e| e.clone())
    }

    pub fn trace(&self) -> T {
        self.mat.trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<T, MatError> {
        Ok(self.spectral()?.min_eigenvalue())
    }

    pub fn is_positive_definite(&self) -> bool {
        matches!(self.min_eigenvalue(), Ok(x) if x > T::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_herm(n: usize, seed: u64) -> CMat<f64> {
        // Small deterministic congruential stream; plenty for exercising eigh.
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let raw = CMat::from_fn(n, n, |_, _| Complex::new(next(), next()));
        raw.herm_part()
    }

    #[test]
    fn eigh_reconstructs_random() {
        for n in [1usize, 2, 3, 5, 8, 17, 40] {
            let a = random_herm(n, 42 + n as u64);
            let sd = eigh(&a).unwrap();
            let rec = sd.reconstruct();
            let rel = rec.sub(&a).frob_norm() / a.frob_norm().max(1.0);
            assert!(rel < 1e-12, "n={n} rel={rel}");
            let gram = sd.unitary.adjoint_mul(&sd.unitary);
            let dev = gram.sub(&CMat::identity(n)).max_abs();
            assert!(dev < 1e-12, "n={n} unitarity dev={dev}");
            for w in sd.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn eigh_handles_degenerate_spectrum() {
        let mut a = CMat::<f64>::identity(6);
        a[(0, 0)] = Complex::new(3.0, 0.0);
        a[(5, 5)] = Complex::new(3.0, 0.0);
        let sd = eigh(&a).unwrap();
        let rec = sd.reconstruct();
        assert!(rec.sub(&a).max_abs() < 1e-13);
        assert!((sd.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((sd.eigenvalues[5] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_matrix_rejects_gross_asymmetry() {
        let mut a = CMat::<f64>::identity(2);
        a[(0, 1)] = Complex::new(1.0, 0.0);
        assert!(HermitianMatrix::new(a).is_err());
    }
}
