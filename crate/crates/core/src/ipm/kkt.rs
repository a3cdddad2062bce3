//! Dense symmetric quasi-definite factorization for the reduced Newton system
//! `[μH, Aᵀ; A, 0]`. The factor carries static regularization `±ε` on the
//! diagonal; solves run iterative refinement against the unregularized matrix
//! to washout the perturbation.

use crate::scalar::Real;

pub struct KktSolver<T: Real> {
    size: usize,
    n: usize,
    /// Unregularized matrix, target of the refinement residuals.
    m: Vec<T>,
    /// In-place LDLᵀ factor of the regularized matrix.
    f: Vec<T>,
    factored: bool,
}

impl<T: Real> KktSolver<T> {
    pub fn new(n: usize, p: usize) -> Self {
        let size = n + p;
        KktSolver { size, n, m: vec![T::zero(); size * size], f: vec![T::zero(); size * size], factored: false }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Assemble and factor. `mu_hess` writes `μH` into the leading n×n block;
    /// `rows` is the sparse A.
    pub fn factor(
        &mut self,
        mu_hess: &dyn Fn(&mut [T], usize),
        rows: &[Vec<(usize, T)>],
        reg: T,
    ) -> bool {
        let s = self.size;
        let n = self.n;
        self.m.fill(T::zero());
        mu_hess(&mut self.m, s);
        for (r, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                self.m[(n + r) * s + j] = v;
                self.m[j * s + (n + r)] = v;
            }
        }
        self.f.copy_from_slice(&self.m);
        for i in 0..n {
            self.f[i * s + i] = self.f[i * s + i] + reg;
        }
        for i in n..s {
            self.f[i * s + i] = self.f[i * s + i] - reg;
        }
        self.factored = ldl_in_place(&mut self.f, s);
        self.factored
    }

    /// Solve `M x = rhs` with two refinement passes; `rhs` is overwritten.
    pub fn solve(&self, rhs: &mut [T]) -> bool {
        if !self.factored {
            return false;
        }
        let s = self.size;
        let b0 = rhs.to_vec();
        ldl_solve(&self.f, rhs, s);
        for _ in 0..2 {
            let mut r = b0.clone();
            for i in 0..s {
                let mrow = &self.m[i * s..(i + 1) * s];
                let mut acc = T::zero();
                for j in 0..s {
                    acc = acc + mrow[j] * rhs[j];
                }
                r[i] = r[i] - acc;
            }
            ldl_solve(&self.f, &mut r, s);
            for i in 0..s {
                rhs[i] = rhs[i] + r[i];
            }
        }
        rhs.iter().all(|v| v.is_finite())
    }
}

/// Unpivoted LDLᵀ of a symmetric (quasi-definite) matrix, in place: on exit
/// the strict lower triangle holds L and the diagonal holds D.
fn ldl_in_place<T: Real>(a: &mut [T], n: usize) -> bool {
    let mut w = vec![T::zero(); n];
    for j in 0..n {
        for k in 0..j {
            w[k] = a[j * n + k] * a[k * n + k];
        }
        let mut dj = a[j * n + j];
        for k in 0..j {
            dj = dj - a[j * n + k] * w[k];
        }
        if dj == T::zero() || !dj.is_finite() {
            return false;
        }
        a[j * n + j] = dj;
        let inv = dj.recip();
        for i in j + 1..n {
            let mut acc = a[i * n + j];
            let (ri, wj) = (&a[i * n..i * n + j], &w[..j]);
            for k in 0..j {
                acc = acc - ri[k] * wj[k];
            }
            a[i * n + j] = acc * inv;
        }
    }
    true
}

fn ldl_solve<T: Real>(f: &[T], b: &mut [T], n: usize) {
    for i in 0..n {
        let mut acc = b[i];
        let row = &f[i * n..i * n + i];
        for k in 0..i {
            acc = acc - row[k] * b[k];
        }
        b[i] = acc;
    }
    for i in 0..n {
        b[i] = b[i] / f[i * n + i];
    }
    for i in (0..n).rev() {
        let mut acc = b[i];
        for k in i + 1..n {
            acc = acc - f[k * n + i] * b[k];
        }
        b[i] = acc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_solve_quasidefinite() {
        // H = diag(2, 3), A = [1 1].
        let n = 2;
        let p = 1;
        let mut kkt = KktSolver::<f64>::new(n, p);
        let rows = vec![vec![(0usize, 1.0f64), (1, 1.0)]];
        let ok = kkt.factor(
            &|m: &mut [f64], s: usize| {
                m[0] = 2.0;
                m[s + 1] = 3.0;
            },
            &rows,
            1e-10,
        );
        assert!(ok);
        let mut rhs = vec![1.0, 2.0, 3.0];
        assert!(kkt.solve(&mut rhs));
        let m = [[2.0, 0.0, 1.0], [0.0, 3.0, 1.0], [1.0, 1.0, 0.0]];
        let b = [1.0, 2.0, 3.0];
        for i in 0..3 {
            let acc: f64 = (0..3).map(|j| m[i][j] * rhs[j]).sum();
            assert!((acc - b[i]).abs() < 1e-12, "row {i}: {acc} vs {}", b[i]);
        }
    }
}
