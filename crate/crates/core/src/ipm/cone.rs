//! The oracle interface every cone presents to the solver.

use crate::scalar::Real;

/// A logarithmically homogeneous self-concordant barrier exposed through
/// value/derivative callbacks over isometric real coordinates.
///
/// `set_point` loads an accepted iterate and builds whatever cache the
/// implementation wants; all other calls refer to that point. `is_interior`
/// is a stateless membership probe used by line searches.
pub trait BarrierOracle<T: Real>: Send {
    fn dim(&self) -> usize;
    fn nu(&self) -> T;
    fn initial_point(&self, out: &mut [T]);
    fn is_interior(&self, x: &[T]) -> bool;
    /// Returns false when `x` is not interior; the previous point stays loaded.
    fn set_point(&mut self, x: &[T]) -> bool;
    fn value(&self) -> T;
    fn gradient(&self, out: &mut [T]);
    fn hess_apply(&self, h: &[T], out: &mut [T]);
    /// `∇³f(x)[·, h, h]`.
    fn third_dir(&self, h: &[T], out: &mut [T]);

    /// Dense Hessian in the cone's coordinates, row-major `dim × dim`.
    fn dense_hessian(&self, out: &mut [T]) {
        let n = self.dim();
        debug_assert_eq!(out.len(), n * n);
        let mut e = vec![T::zero(); n];
        let mut col = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            self.hess_apply(&e, &mut col);
            e[j] = T::zero();
            for i in 0..n {
                out[i * n + j] = col[i];
            }
        }
        // Symmetrize away the round-off skew.
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (out[i * n + j] + out[j * n + i]) * T::of(0.5);
                out[i * n + j] = avg;
                out[j * n + i] = avg;
            }
        }
    }
}
