//! Dense complex matrices, row-major.
//!
//! Minimal arithmetic tuned for the sizes this crate actually handles
//! (side lengths up to a couple hundred). Multiplication uses an ikj loop so
//! the inner updates run over contiguous rows.

use crate::scalar::{czero, Real, C};
use num_complex::Complex;

#[derive(Clone, PartialEq)]
pub struct CMat<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> std::fmt::Debug for CMat<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.3e}{:+.3e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from a row-major slice of (re, im) pairs given as f64.
    pub fn from_rows_f64(rows: usize, cols: usize, entries: &[(f64, f64)]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let mut m = Self::zeros(rows, cols);
        for (k, &(re, im)) in entries.iter().enumerate() {
            m.data[k] = Complex::new(T::of(re), T::of(im));
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = Complex::new(x, T::zero());
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [C<T>] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for z in out.data.iter_mut() {
            *z = z.conj();
        }
        out
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut out = self.clone();
        for z in out.data.iter_mut() {
            *z = *z * s;
        }
        out
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (z, w) in out.data.iter_mut().zip(other.data.iter()) {
            *z = *z + *w;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (z, w) in out.data.iter_mut().zip(other.data.iter()) {
            *z = *z - *w;
        }
        out
    }

    pub fn axpy(&mut self, a: T, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let ca = Complex::new(a, T::zero());
        for (z, w) in self.data.iter_mut().zip(other.data.iter()) {
            *z = *z + ca * *w;
        }
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            let arow = self.row(i);
            let orow = out.row_mut(i);
            for (k, &aik) in arow.iter().enumerate() {
                if aik.re == T::zero() && aik.im == T::zero() {
                    continue;
                }
                let brow = other.row(k);
                for j in 0..n {
                    orow[j] = orow[j] + aik * brow[j];
                }
            }
        }
        out
    }

    /// `self† * other` without forming the adjoint.
    pub fn adjoint_mul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "adjoint matmul dimension mismatch");
        let mut out = Self::zeros(self.cols, other.cols);
        let n = other.cols;
        for k in 0..self.rows {
            let arow = self.row(k);
            let brow = other.row(k);
            for (i, &aki) in arow.iter().enumerate() {
                let a = aki.conj();
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let orow = out.row_mut(i);
                for j in 0..n {
                    orow[j] = orow[j] + a * brow[j];
                }
            }
        }
        out
    }

    /// `self * other†` without forming the adjoint.
    pub fn mul_adjoint(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "matmul-adjoint dimension mismatch");
        let mut out = Self::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let arow = self.row(i);
            for j in 0..other.rows {
                let brow = other.row(j);
                let mut acc = czero();
                for k in 0..self.cols {
                    acc = acc + arow[k] * brow[k].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Congruence `m * self * m†`.
    pub fn congruence(&self, m: &Self) -> Self {
        m.mul(self).mul_adjoint(m)
    }

    /// Congruence by the adjoint, `m† * self * m`.
    pub fn congruence_adjoint(&self, m: &Self) -> Self {
        m.adjoint_mul(self).mul(m)
    }

    pub fn trace(&self) -> C<T> {
        debug_assert!(self.is_square());
        let mut t = czero();
        for i in 0..self.rows {
            t = t + self[(i, i)];
        }
        t
    }

    /// Hilbert-Schmidt inner product `Tr[self† other]`.
    pub fn hs_inner(&self, other: &Self) -> C<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut acc = czero();
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            acc = acc + a.conj() * *b;
        }
        acc
    }

    pub fn frob_norm(&self) -> T {
        let mut acc = T::zero();
        for z in self.data.iter() {
            acc = acc + z.norm_sqr();
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for z in self.data.iter() {
            let a = z.re.abs().max(z.im.abs());
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Hermitian part `(self + self†)/2`.
    pub fn herm_part(&self) -> Self {
        debug_assert!(self.is_square());
        let half = T::of(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * Complex::new(half, T::zero())
        })
    }

    /// Largest deviation from Hermiticity, `max |A_ij - conj(A_ji)|`.
    pub fn herm_deviation(&self) -> T {
        debug_assert!(self.is_square());
        let mut dev = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = self[(i, j)] - self[(j, i)].conj();
                dev = dev.max(d.norm());
            }
        }
        dev
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r1, c1) = (self.rows, self.cols);
        let (r2, c2) = (other.rows, other.cols);
        let mut out = Self::zeros(r1 * r2, c1 * c2);
        for i1 in 0..r1 {
            for j1 in 0..c1 {
                let a = self[(i1, j1)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for i2 in 0..r2 {
                    for j2 in 0..c2 {
                        out[(i1 * r2 + i2, j1 * c2 + j2)] = a * other[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    /// Extract the square sub-block with row/column index sets.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        let mut out = Self::zeros(row_idx.len(), col_idx.len());
        for (i, &ri) in row_idx.iter().enumerate() {
            for (j, &cj) in col_idx.iter().enumerate() {
                out[(i, j)] = self[(ri, cj)];
            }
        }
        out
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_and_adjoint_agree() {
        let a = CMat::<f64>::from_rows_f64(2, 3, &[
            (1.0, 0.5), (0.0, -1.0), (2.0, 0.0),
            (0.3, 0.0), (1.0, 1.0), (-1.0, 0.2),
        ]);
        let b = CMat::<f64>::from_rows_f64(3, 2, &[
            (0.2, 0.1), (1.0, 0.0),
            (0.0, 0.0), (0.5, -0.5),
            (1.0, 1.0), (0.0, 2.0),
        ]);
        let ab = a.mul(&b);
        let ref_ab = a.adjoint().adjoint_mul(&b);
        assert!(ab.sub(&ref_ab).max_abs() < 1e-14);
        let ba = b.adjoint().mul(&a.adjoint());
        assert!(ba.sub(&ab.adjoint()).max_abs() < 1e-14);
        let m = a.mul_adjoint(&a);
        let ref_m = a.mul(&a.adjoint());
        assert!(m.sub(&ref_m).max_abs() < 1e-14);
    }

    #[test]
    fn hs_inner_matches_trace() {
        let a = CMat::<f64>::from_rows_f64(2, 2, &[(1.0, 2.0), (0.0, 1.0), (3.0, 0.0), (0.5, 0.5)]);
        let b = CMat::<f64>::from_rows_f64(2, 2, &[(0.0, 1.0), (2.0, 0.0), (1.0, 1.0), (0.0, 0.0)]);
        let direct = a.hs_inner(&b);
        let via_trace = a.adjoint().mul(&b).trace();
        assert!((direct - via_trace).norm() < 1e-14);
    }
}
