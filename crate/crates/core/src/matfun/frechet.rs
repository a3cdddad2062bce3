//! Spectral functions of Hermitian matrices and their Fréchet derivatives.
//!
//! All derivative formulas are Hadamard products with divided-difference
//! tables in the eigenbasis of the base point. The `*_rotated` variants take
//! directions already rotated into that eigenbasis, which lets callers share
//! rotations across many evaluations at the same point.

use super::cmat::CMat;
use super::dd::{Dd1Table, Dd2Table, ScalarFn};
use super::herm::{HermitianMatrix, SpectralDecomposition};
use super::MatError;
use crate::scalar::{cre, czero, Real};

/// Map eigenvalues through `f`, verifying the domain. Errors name the first
/// offending eigenvalue.
pub fn fn_values<T: Real, F: ScalarFn<T> + ?Sized>(f: &F, lams: &[T]) -> Result<Vec<T>, MatError> {
    let mut out = Vec::with_capacity(lams.len());
    for &x in lams {
        if !f.domain_contains(x) {
            return Err(MatError::DomainViolation { eigenvalue: x.to_f64().unwrap_or(f64::NAN) });
        }
        out.push(f.f(x));
    }
    Ok(out)
}

/// `f(X) = U diag(f(λ)) U†`.
pub fn spectral_apply<T: Real, F: ScalarFn<T> + ?Sized>(
    f: &F,
    x: &HermitianMatrix<T>,
) -> Result<HermitianMatrix<T>, MatError> {
    let sd = x.spectral()?;
    let vals = fn_values(f, &sd.eigenvalues)?;
    Ok(HermitianMatrix::symmetrize(sd.apply_values(&vals)))
}

/// `U† H U`.
pub fn rotate_into<T: Real>(u: &CMat<T>, h: &CMat<T>) -> CMat<T> {
    u.adjoint_mul(h).mul(u)
}

/// `U H U†`.
pub fn rotate_outof<T: Real>(u: &CMat<T>, h: &CMat<T>) -> CMat<T> {
    u.mul(h).mul_adjoint(u)
}

/// First Fréchet derivative in the eigenbasis: `F¹ ∘ H̃`.
pub fn dfrechet_rotated<T: Real>(t1: &Dd1Table<T>, h_rot: &CMat<T>) -> CMat<T> {
    let n = t1.n;
    CMat::from_fn(n, n, |i, j| h_rot[(i, j)] * cre(t1.at(i, j)))
}

/// Second Fréchet derivative in the eigenbasis:
/// `[·]_ij = Σ_k f²(λi,λj,λk) (H̃_ik K̃_kj + K̃_ik H̃_kj)`.
pub fn d2frechet_rotated<T: Real>(t2: &Dd2Table<T>, h_rot: &CMat<T>, k_rot: &CMat<T>) -> CMat<T> {
    let n = t2.n;
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        let hrow = h_rot.row(i);
        let krow = k_rot.row(i);
        for j in 0..n {
            let mut acc = czero::<T>();
            for k in 0..n {
                let w = cre(t2.at(i, j, k));
                acc = acc + w * (hrow[k] * k_rot[(k, j)] + krow[k] * h_rot[(k, j)]);
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Third divided difference over ascending eigenvalues, reusing a cached
/// second-difference table for the recursion.
#[inline]
fn dd3_from_table<T: Real, F: ScalarFn<T> + ?Sized>(
    f: &F,
    lams: &[T],
    t2: &Dd2Table<T>,
    scale: T,
    mut idx: [usize; 4],
) -> T {
    idx.sort_unstable();
    let [p0, p1, p2, p3] = idx;
    let span = lams[p3] - lams[p0];
    if span.abs() < super::dd::coincidence_tol::<T>() * scale {
        return f.d3f((lams[p1] + lams[p2]) * T::of(0.5)) / T::of(6.0);
    }
    (t2.at(p1, p2, p3) - t2.at(p0, p1, p2)) / span
}

/// Third Fréchet derivative in the eigenbasis, fully symmetric in the three
/// rotated directions:
/// `[·]_ij = Σ_{perm} Σ_{k,l} f³(λi,λk,λl,λj) A_ik B_kl C_lj`.
pub fn d3frechet_rotated<T: Real, F: ScalarFn<T> + ?Sized>(
    f: &F,
    lams: &[T],
    t2: &Dd2Table<T>,
    a_rot: &CMat<T>,
    b_rot: &CMat<T>,
    c_rot: &CMat<T>,
) -> CMat<T> {
    let n = lams.len();
    let mut scale = T::one();
    for &x in lams {
        scale = scale.max(x.abs());
    }
    let mut out = CMat::zeros(n, n);
    let perms: [(&CMat<T>, &CMat<T>, &CMat<T>); 6] = [
        (a_rot, b_rot, c_rot),
        (a_rot, c_rot, b_rot),
        (b_rot, a_rot, c_rot),
        (b_rot, c_rot, a_rot),
        (c_rot, a_rot, b_rot),
        (c_rot, b_rot, a_rot),
    ];
    for i in 0..n {
        for j in 0..n {
            let mut acc = czero::<T>();
            for k in 0..n {
                for l in 0..n {
                    let w = dd3_from_table(f, lams, t2, scale, [i, k, l, j]);
                    if w == T::zero() {
                        continue;
                    }
                    let mut term = czero::<T>();
                    for (x, y, z) in perms.iter() {
                        term = term + x[(i, k)] * y[(k, l)] * z[(l, j)];
                    }
                    acc = acc + term * cre(w);
                }
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Fréchet derivative of the spectral function `f` at `x`, order given by the
/// number of directions: `Df(X)[H]`, `D²f(X)[H,K]`, or `D³f(X)[H,K,L]`.
pub fn frechet_derivative<T: Real, F: ScalarFn<T> + ?Sized>(
    f: &F,
    x: &HermitianMatrix<T>,
    dirs: &[&HermitianMatrix<T>],
) -> Result<HermitianMatrix<T>, MatError> {
    let sd: &SpectralDecomposition<T> = x.spectral()?;
    let lams = &sd.eigenvalues;
    for &lam in lams {
        if !f.domain_contains(lam) {
            return Err(MatError::DomainViolation { eigenvalue: lam.to_f64().unwrap_or(f64::NAN) });
        }
    }
    let u = &sd.unitary;
    let rotated: Vec<CMat<T>> = dirs.iter().map(|d| rotate_into(u, d.mat())).collect();
    let result = match rotated.len() {
        1 => {
            let t1 = Dd1Table::build(f, lams);
            dfrechet_rotated(&t1, &rotated[0])
        }
        2 => {
            let t2 = Dd2Table::build(f, lams);
            d2frechet_rotated(&t2, &rotated[0], &rotated[1])
        }
        3 => {
            let t2 = Dd2Table::build(f, lams);
            d3frechet_rotated(f, lams, &t2, &rotated[0], &rotated[1], &rotated[2])
        }
        n => return Err(MatError::BadOrder(n as u8)),
    };
    Ok(HermitianMatrix::symmetrize(rotate_outof(u, &result)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::dd::PowerFn;
    use num_complex::Complex;

    fn rng_mat(n: usize, seed: u64) -> HermitianMatrix<f64> {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        HermitianMatrix::symmetrize(CMat::from_fn(n, n, |_, _| Complex::new(next(), next())))
    }

    fn rng_psd(n: usize, seed: u64, floor: f64) -> HermitianMatrix<f64> {
        let a = rng_mat(n, seed);
        let sq = a.mat().mul_adjoint(a.mat());
        let mut m = sq;
        for i in 0..n {
            m[(i, i)] = m[(i, i)] + Complex::new(floor, 0.0);
        }
        HermitianMatrix::symmetrize(m)
    }

    #[test]
    fn spectral_apply_identity_and_square() {
        let x = rng_mat(4, 7);
        let id = PowerFn::new(1.0f64);
        let y = spectral_apply(&id, &x).unwrap();
        assert!(y.mat().sub(x.mat()).max_abs() < 1e-12);

        let d = HermitianMatrix::<f64>::diag(&[1.0, 2.0]);
        let sq = spectral_apply(&PowerFn::new(2.0f64), &d).unwrap();
        assert!((sq.mat()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((sq.mat()[(1, 1)].re - 4.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_squares_back() {
        let x = rng_psd(4, 3, 0.1);
        let r = spectral_apply(&PowerFn::new(0.5f64), &x).unwrap();
        let back = r.mat().mul(r.mat());
        assert!(back.sub(x.mat()).max_abs() < 1e-10 * x.mat().max_abs().max(1.0));
    }

    #[test]
    fn domain_error_names_eigenvalue() {
        let x = HermitianMatrix::diag(&[1.0, -0.5]);
        let err = spectral_apply(&PowerFn::new(0.5f64), &x).unwrap_err();
        match err {
            MatError::DomainViolation { eigenvalue } => assert!((eigenvalue + 0.5).abs() < 1e-12),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn cube_derivative_polynomial_identity() {
        // D x^3 (X)[H] = X²H + XHX + HX².
        let x = rng_mat(3, 11);
        let h = rng_mat(3, 12);
        let d = frechet_derivative(&PowerFn::new(3.0f64), &x, &[&h]).unwrap();
        let xm = x.mat();
        let hm = h.mat();
        let x2 = xm.mul(xm);
        let expect = x2.mul(hm).add(&xm.mul(hm).mul(xm)).add(&hm.mul(&x2));
        assert!(d.mat().sub(&expect).max_abs() < 1e-11 * expect.max_abs().max(1.0));
    }

    #[test]
    fn self_adjointness_first_order() {
        let x = rng_psd(4, 21, 0.3);
        let h = rng_mat(4, 22);
        let a = rng_mat(4, 23);
        let f = PowerFn::new(0.62f64);
        let dh = frechet_derivative(&f, &x, &[&h]).unwrap();
        let da = frechet_derivative(&f, &x, &[&a]).unwrap();
        let lhs = a.mat().hs_inner(dh.mat()).re;
        let rhs = da.mat().hs_inner(h.mat()).re;
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn self_adjointness_higher_orders() {
        let x = rng_psd(4, 31, 0.4);
        let h = rng_mat(4, 32);
        let k = rng_mat(4, 33);
        let a = rng_mat(4, 34);
        let f = PowerFn::new(0.58f64);
        // <A, D²f[H,K]> = <D²f[H,A], K>
        let d2hk = frechet_derivative(&f, &x, &[&h, &k]).unwrap();
        let d2ha = frechet_derivative(&f, &x, &[&h, &a]).unwrap();
        let lhs = a.mat().hs_inner(d2hk.mat()).re;
        let rhs = d2ha.mat().hs_inner(k.mat()).re;
        assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
        // <A, D³f[H,K,L]> = <D³f[H,K,A], L>
        let l = rng_mat(4, 35);
        let d3hkl = frechet_derivative(&f, &x, &[&h, &k, &l]).unwrap();
        let d3hka = frechet_derivative(&f, &x, &[&h, &k, &a]).unwrap();
        let lhs3 = a.mat().hs_inner(d3hkl.mat()).re;
        let rhs3 = d3hka.mat().hs_inner(l.mat()).re;
        assert!((lhs3 - rhs3).abs() < 1e-9 * lhs3.abs().max(1.0));
    }

    #[test]
    fn finite_difference_first_and_second_order() {
        let x = rng_psd(4, 41, 0.5);
        let h = rng_mat(4, 42);
        let f = PowerFn::new(0.71f64);
        let eps = 1e-5;
        let shift = |s: f64| {
            let m = x.mat().add(&h.mat().scale_re(s));
            spectral_apply(&f, &HermitianMatrix::symmetrize(m)).unwrap()
        };
        let d1 = frechet_derivative(&f, &x, &[&h]).unwrap();
        let fd1 = shift(eps).mat().sub(shift(-eps).mat()).scale_re(0.5 / eps);
        let rel1 = d1.mat().sub(&fd1).max_abs() / d1.mat().max_abs().max(1.0);
        assert!(rel1 < 1e-6, "rel1={rel1}");

        let d2 = frechet_derivative(&f, &x, &[&h, &h]).unwrap();
        let fd2 = shift(eps)
            .mat()
            .add(shift(-eps).mat())
            .sub(&shift(0.0).mat().scale_re(2.0))
            .scale_re(1.0 / (eps * eps));
        let rel2 = d2.mat().sub(&fd2).max_abs() / d2.mat().max_abs().max(1.0);
        assert!(rel2 < 1e-4, "rel2={rel2}");
    }

    #[test]
    fn composition_of_spectral_functions() {
        let x = rng_psd(5, 51, 0.2);
        let g = PowerFn::new(0.5f64);
        let f = PowerFn::new(3.0f64);
        let inner = spectral_apply(&g, &x).unwrap();
        let lhs = spectral_apply(&f, &inner).unwrap();
        let rhs = spectral_apply(&PowerFn::new(1.5f64), &x).unwrap();
        assert!(lhs.mat().sub(rhs.mat()).max_abs() < 1e-10 * rhs.mat().max_abs().max(1.0));
    }
}
