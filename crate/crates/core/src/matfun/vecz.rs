//! Isometric real vectorization of Hermitian matrices.
//!
//! Layout per matrix: walk the upper triangle by columns; diagonal entries map
//! to themselves, each off-diagonal pair contributes `√2 Re` then `√2 Im`. The
//! Hilbert-Schmidt inner product turns into the Euclidean dot product, so
//! Hessians presented in these coordinates are plain real symmetric matrices.

use super::cmat::CMat;
use crate::scalar::Real;
use num_complex::Complex;

/// Real coordinate count for a Hermitian matrix of side `n`.
#[inline]
pub fn svec_len(n: usize) -> usize {
    n * n
}

/// Total real coordinate count for a list of block side lengths.
#[inline]
pub fn svec_len_blocks(dims: &[usize]) -> usize {
    dims.iter().map(|&n| n * n).sum()
}

fn sqrt2<T: Real>() -> T {
    T::of(std::f64::consts::SQRT_2)
}

/// Write the vectorization of (the Hermitian part of) `m` into `out`.
pub fn svec_into<T: Real>(m: &CMat<T>, out: &mut [T]) {
    let n = m.rows();
    debug_assert_eq!(out.len(), svec_len(n));
    let s2 = sqrt2::<T>();
    let mut k = 0;
    for j in 0..n {
        for i in 0..=j {
            if i == j {
                out[k] = m[(i, i)].re;
                k += 1;
            } else {
                let half = (m[(i, j)] + m[(j, i)].conj()) * Complex::new(T::of(0.5), T::zero());
                out[k] = s2 * half.re;
                out[k + 1] = s2 * half.im;
                k += 2;
            }
        }
    }
}

pub fn svec<T: Real>(m: &CMat<T>) -> Vec<T> {
    let mut out = vec![T::zero(); svec_len(m.rows())];
    svec_into(m, &mut out);
    out
}

/// Reconstruct the Hermitian matrix from its vectorization.
pub fn unsvec<T: Real>(v: &[T], n: usize) -> CMat<T> {
    debug_assert_eq!(v.len(), svec_len(n));
    let inv_s2 = T::one() / sqrt2::<T>();
    let mut m = CMat::zeros(n, n);
    let mut k = 0;
    for j in 0..n {
        for i in 0..=j {
            if i == j {
                m[(i, i)] = Complex::new(v[k], T::zero());
                k += 1;
            } else {
                let z = Complex::new(v[k] * inv_s2, v[k + 1] * inv_s2);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                k += 2;
            }
        }
    }
    m
}

/// Vectorize a list of Hermitian blocks back to back.
pub fn svec_blocks<T: Real>(blocks: &[CMat<T>]) -> Vec<T> {
    let total = blocks.iter().map(|b| svec_len(b.rows())).sum();
    let mut out = vec![T::zero(); total];
    let mut off = 0;
    for b in blocks {
        let len = svec_len(b.rows());
        svec_into(b, &mut out[off..off + len]);
        off += len;
    }
    out
}

/// Reconstruct a list of Hermitian blocks with the given side lengths.
pub fn unsvec_blocks<T: Real>(v: &[T], dims: &[usize]) -> Vec<CMat<T>> {
    let mut out = Vec::with_capacity(dims.len());
    let mut off = 0;
    for &n in dims {
        let len = svec_len(n);
        out.push(unsvec(&v[off..off + len], n));
        off += len;
    }
    out
}

/// The `idx`-th orthonormal Hermitian basis matrix for side `n` (matching the
/// svec coordinate order).
pub fn basis_matrix<T: Real>(n: usize, idx: usize) -> CMat<T> {
    let mut v = vec![T::zero(); svec_len(n)];
    v[idx] = T::one();
    unsvec(&v, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng_herm(n: usize, seed: u64) -> CMat<f64> {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        CMat::from_fn(n, n, |_, _| Complex::new(next(), next())).herm_part()
    }

    #[test]
    fn round_trip_and_inner_product() {
        for n in [1usize, 2, 3, 6] {
            let a = rng_herm(n, 5 + n as u64);
            let b = rng_herm(n, 50 + n as u64);
            let va = svec(&a);
            let vb = svec(&b);
            let back = unsvec(&va, n);
            assert!(back.sub(&a).max_abs() < 1e-14);
            let dot: f64 = va.iter().zip(vb.iter()).map(|(x, y)| x * y).sum();
            let hs = a.hs_inner(&b).re;
            assert!((dot - hs).abs() < 1e-12 * hs.abs().max(1.0));
        }
    }

    #[test]
    fn basis_matrices_are_orthonormal() {
        let n = 3;
        for i in 0..svec_len(n) {
            for j in 0..svec_len(n) {
                let bi = basis_matrix::<f64>(n, i);
                let bj = basis_matrix::<f64>(n, j);
                let ip = bi.hs_inner(&bj).re;
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-14);
            }
        }
    }
}
