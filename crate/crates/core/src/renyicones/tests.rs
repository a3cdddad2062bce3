//! Finite-difference and structural checks for the cone barrier engine.
//!
//! The finite-difference comparisons here are the ground truth for the closed
//! derivative formulas; they are deliberately written against the cache API
//! only, never against internals.

use super::engine::{psi_hat, ConeDir, ConePoint, PointCache};
use super::init::initial_point;
use super::spec::{ConeVariant, ReducedConeSpec};
use crate::channels::KrausMap;
use crate::matfun::CMat;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type R = ChaCha8Rng;

fn rng_cmat(rng: &mut R, r: usize, c: usize) -> CMat<f64> {
    CMat::from_fn(r, c, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn rng_herm(rng: &mut R, n: usize) -> CMat<f64> {
    rng_cmat(rng, n, n).herm_part()
}

fn rng_psd(rng: &mut R, n: usize, floor: f64) -> CMat<f64> {
    let a = rng_cmat(rng, n, n);
    let mut m = a.mul_adjoint(&a).scale_re(1.0 / n as f64);
    for i in 0..n {
        m[(i, i)] += Complex::new(floor, 0.0);
    }
    m.herm_part()
}

fn random_isometry(rng: &mut R, n: usize, k: usize) -> CMat<f64> {
    assert!(n >= k);
    let a = rng_cmat(rng, n, k);
    // Gram-Schmidt on columns.
    let mut cols: Vec<Vec<Complex<f64>>> = (0..k).map(|j| (0..n).map(|i| a[(i, j)]).collect()).collect();
    for j in 0..k {
        for l in 0..j {
            let mut ip = Complex::new(0.0, 0.0);
            for i in 0..n {
                ip += cols[l][i].conj() * cols[j][i];
            }
            for i in 0..n {
                let cl = cols[l][i];
                cols[j][i] -= ip * cl;
            }
        }
        let nrm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            cols[j][i] /= Complex::new(nrm, 0.0);
        }
    }
    CMat::from_fn(n, k, |i, j| cols[j][i])
}

/// Strictly positive CP map d_in -> d_out built from random Kraus operators.
fn random_sp_map(rng: &mut R, d_in: usize, d_out: usize) -> KrausMap<f64> {
    loop {
        let count = d_out.div_ceil(d_in) + 1;
        let kraus: Vec<CMat<f64>> = (0..count).map(|_| rng_cmat(rng, d_out, d_in)).collect();
        let map = KrausMap::new(kraus).unwrap();
        if map.is_strictly_positive().unwrap() {
            return map;
        }
    }
}

pub(super) fn random_spec(rng: &mut R, variant: ConeVariant, q: usize, m: usize, alpha: f64) -> ReducedConeSpec<f64> {
    let k = if q > 2 && rng.gen_bool(0.5) { q - 1 } else { q };
    let ghat = random_sp_map(rng, q, k);
    let (zhat, s_blocks) = match variant {
        ConeVariant::True => {
            let n = k.max(m);
            let zhat = vec![random_sp_map(rng, m, n)];
            let s = random_isometry(rng, n, k);
            (zhat, vec![s])
        }
        ConeVariant::Fast => {
            let n = k.max(2);
            let zhat = vec![random_sp_map(rng, q, n), random_sp_map(rng, q, n)];
            let s_full = random_isometry(rng, 2 * n, k);
            let s0 = CMat::from_fn(n, k, |i, j| s_full[(i, j)]);
            let s1 = CMat::from_fn(n, k, |i, j| s_full[(n + i, j)]);
            (zhat, vec![s0, s1])
        }
    };
    ReducedConeSpec::new(alpha, variant, ghat, zhat, s_blocks).unwrap()
}

pub(super) fn random_interior(rng: &mut R, spec: &ReducedConeSpec<f64>) -> ConePoint<f64> {
    let rho = rng_psd(rng, spec.q_dim(), 0.4);
    let sigma: Vec<CMat<f64>> = spec.sigma_dims().iter().map(|&d| rng_psd(rng, d, 0.4)).collect();
    let psi = psi_hat(spec, &rho, &sigma).unwrap();
    let u = -psi + 0.3 + rng.gen_range(0.0..1.0);
    ConePoint { u, rho, sigma }
}

fn random_dir(rng: &mut R, spec: &ReducedConeSpec<f64>) -> ConeDir<f64> {
    ConeDir {
        du: rng.gen_range(-1.0..1.0),
        drho: rng_herm(rng, spec.q_dim()),
        dsigma: spec.sigma_dims().iter().map(|&d| rng_herm(rng, d)).collect(),
    }
}

fn shifted(point: &ConePoint<f64>, dir: &ConeDir<f64>, t: f64) -> ConePoint<f64> {
    let mut p = point.clone();
    p.u += t * dir.du;
    p.drho_shift(dir, t);
    p
}

impl ConePoint<f64> {
    fn drho_shift(&mut self, dir: &ConeDir<f64>, t: f64) {
        self.rho = self.rho.add(&dir.drho.scale_re(t));
        for (s, d) in self.sigma.iter_mut().zip(dir.dsigma.iter()) {
            *s = s.add(&d.scale_re(t));
        }
    }
}

fn barrier_at(spec: &ReducedConeSpec<f64>, p: &ConePoint<f64>) -> f64 {
    PointCache::build(spec, p.clone()).unwrap().expect("interior").barrier()
}

fn grad_at(spec: &ReducedConeSpec<f64>, p: &ConePoint<f64>) -> ConeDir<f64> {
    let c = PointCache::build(spec, p.clone()).unwrap().expect("interior");
    let g = c.gradient();
    ConeDir { du: g.du, drho: g.drho, dsigma: g.dsigma }
}

/// 5-point central difference of a scalar function of t at 0.
fn fd5(mut f: impl FnMut(f64) -> f64, eps: f64) -> f64 {
    (-f(2.0 * eps) + 8.0 * f(eps) - 8.0 * f(-eps) + f(-2.0 * eps)) / (12.0 * eps)
}

fn spec_matrix(variant: ConeVariant) -> &'static str {
    match variant {
        ConeVariant::True => "true",
        ConeVariant::Fast => "fast",
    }
}

#[test]
fn psi_classical_diagonal() {
    // Identity maps, diagonal inputs: Ψ̂ = Σ p_i^α q_i^(1-α).
    let alpha = 0.5;
    let spec = ReducedConeSpec::new(
        alpha,
        ConeVariant::True,
        KrausMap::identity(2),
        vec![KrausMap::identity(2)],
        vec![CMat::identity(2)],
    )
    .unwrap();
    let rho = CMat::diag(&[0.7, 0.3]);
    let sigma = CMat::diag(&[0.5, 0.5]);
    let psi = psi_hat(&spec, &rho, &[sigma]).unwrap();
    let expect = 0.7f64.powf(0.5) * 0.5f64.powf(0.5) + 0.3f64.powf(0.5) * 0.5f64.powf(0.5);
    assert!((psi - expect).abs() < 1e-12, "psi={psi} expect={expect}");
    assert!((expect - 0.97891).abs() < 1e-4);

    // ρ = σ collapses the sandwich: Ψ̂ = Tr ρ.
    let psi_eq = psi_hat(&spec, &rho, &[rho.clone()]).unwrap();
    assert!((psi_eq - 1.0).abs() < 1e-12);
}

#[test]
fn barrier_zero_case_and_boundary() {
    let alpha = 0.7;
    let spec = ReducedConeSpec::new(
        alpha,
        ConeVariant::True,
        KrausMap::identity(2),
        vec![KrausMap::identity(2)],
        vec![CMat::identity(2)],
    )
    .unwrap();
    let rho = CMat::identity(2);
    let sigma = CMat::identity(2);
    let psi = psi_hat(&spec, &rho, &[sigma.clone()]).unwrap();
    // u + Ψ̂ = 1 makes every log vanish.
    let p = ConePoint { u: 1.0 - psi, rho: rho.clone(), sigma: vec![sigma.clone()] };
    assert!(barrier_at(&spec, &p).abs() < 1e-12);

    // u → s Ψ̂ from above: the barrier diverges monotonically.
    let mut last = f64::NEG_INFINITY;
    for gap in [1e-1, 1e-3, 1e-6, 1e-9] {
        let p = ConePoint { u: -psi + gap, rho: rho.clone(), sigma: vec![sigma.clone()] };
        let f = barrier_at(&spec, &p);
        assert!(f > last);
        last = f;
    }
    assert!(last > 18.0);
}

#[test]
fn gradient_identity_maps_equal_states() {
    // Identity maps, ρ = σ: ∇ρΨ̂ = α·1 and ∇σΨ̂ = (1−α)·1.
    let mut rng = R::seed_from_u64(7);
    for &alpha in &[0.5, 0.65, 0.9] {
        let d = 3;
        let spec = ReducedConeSpec::new(
            alpha,
            ConeVariant::True,
            KrausMap::identity(d),
            vec![KrausMap::identity(d)],
            vec![CMat::identity(d)],
        )
        .unwrap();
        let rho = rng_psd(&mut rng, d, 0.5);
        let p = ConePoint { u: 1.0, rho: rho.clone(), sigma: vec![rho.clone()] };
        let cache = PointCache::build(&spec, p).unwrap().unwrap();
        let g = cache.gradient();
        // Recover ∇Ψ̂ from the barrier gradient: ∇ρf = (s/z) ∇ρΨ̂ − ρ^{-1}.
        let z = cache.gap;
        let rho_inv = {
            let sd = crate::matfun::eigh(&rho).unwrap();
            let inv: Vec<f64> = sd.eigenvalues.iter().map(|&x| 1.0 / x).collect();
            sd.apply_values(&inv)
        };
        let grad_psi_rho = g.drho.add(&rho_inv).scale_re(-z);
        let dev_r = grad_psi_rho.sub(&CMat::identity(d).scale_re(alpha)).max_abs();
        assert!(dev_r < 1e-9, "alpha={alpha} dev={dev_r}");
        let grad_psi_sig = g.dsigma[0].add(&rho_inv).scale_re(-z);
        let dev_s = grad_psi_sig.sub(&CMat::identity(d).scale_re(1.0 - alpha)).max_abs();
        assert!(dev_s < 1e-9, "alpha={alpha} dev={dev_s}");
    }
}

#[test]
fn finite_difference_ladder_both_variants() {
    let mut rng = R::seed_from_u64(11);
    for variant in [ConeVariant::True, ConeVariant::Fast] {
        for &alpha in &[0.55, 0.7, 0.9, 0.99] {
            let (q, m) = (3, 2);
            let spec = random_spec(&mut rng, variant, q, m, alpha);
            for trial in 0..3 {
                let x = random_interior(&mut rng, &spec);
                let h = random_dir(&mut rng, &spec);
                let eps = 1e-4;

                // Gradient vs FD of the barrier.
                let g = grad_at(&spec, &x);
                let fd_g = fd5(|t| barrier_at(&spec, &shifted(&x, &h, t)), eps);
                let an_g = g.dot(&h);
                let rel = (fd_g - an_g).abs() / an_g.abs().max(1.0);
                assert!(rel < 1e-7, "{} alpha={alpha} trial={trial} grad rel={rel}", spec_matrix(variant));

                // Hessian action vs FD of the gradient (probe with a second direction).
                let cache = PointCache::build(&spec, x.clone()).unwrap().unwrap();
                let hh = cache.hess_apply(&spec, &h).unwrap();
                let a = random_dir(&mut rng, &spec);
                let fd_h = fd5(|t| grad_at(&spec, &shifted(&x, &h, t)).dot(&a), eps);
                let an_h = hh.dot(&a);
                let rel = (fd_h - an_h).abs() / an_h.abs().max(1.0);
                assert!(rel < 1e-6, "{} alpha={alpha} trial={trial} hess rel={rel}", spec_matrix(variant));

                // Third order vs FD of the Hessian action along h.
                let t3 = cache.third_dir(&spec, &h).unwrap();
                let fd_t = fd5(
                    |t| {
                        let xc = shifted(&x, &h, t);
                        let c = PointCache::build(&spec, xc).unwrap().unwrap();
                        c.hess_apply(&spec, &h).unwrap().dot(&a)
                    },
                    eps,
                );
                let an_t = t3.dot(&a);
                let rel = (fd_t - an_t).abs() / an_t.abs().max(1.0);
                assert!(rel < 1e-5, "{} alpha={alpha} trial={trial} third rel={rel}", spec_matrix(variant));
            }
        }
    }
}

#[test]
fn lhscb_identities() {
    let mut rng = R::seed_from_u64(23);
    for variant in [ConeVariant::True, ConeVariant::Fast] {
        for &alpha in &[0.55, 0.8] {
            let spec = random_spec(&mut rng, variant, 3, 3, alpha);
            let nu = spec.nu();
            for _ in 0..4 {
                let x = random_interior(&mut rng, &spec);
                let cache = PointCache::build(&spec, x.clone()).unwrap().unwrap();
                let f0 = cache.barrier();
                let g = cache.gradient();
                let x_as_dir = ConeDir { du: x.u, drho: x.rho.clone(), dsigma: x.sigma.clone() };

                // ν-log-homogeneity.
                for &lam in &[0.5, 2.0, 10.0] {
                    let xs = ConePoint {
                        u: lam * x.u,
                        rho: x.rho.scale_re(lam),
                        sigma: x.sigma.iter().map(|s| s.scale_re(lam)).collect(),
                    };
                    let fl = barrier_at(&spec, &xs);
                    let dev = (fl - f0 + nu * lam.ln()).abs();
                    assert!(dev < 1e-9, "homogeneity dev={dev}");
                }

                // <∇f, x> = −ν.
                let ip = g.dot(&x_as_dir);
                assert!((ip + nu).abs() < 1e-9, "grad identity dev={}", (ip + nu).abs());

                // ∇²f·x = −∇f.
                let hx = cache.hess_apply(&spec, &x_as_dir).unwrap();
                let mut dev: f64 = (hx.du + g.du).abs();
                dev = dev.max(hx.drho.add(&g.drho).max_abs());
                for (a, b) in hx.dsigma.iter().zip(g.dsigma.iter()) {
                    dev = dev.max(a.add(b).max_abs());
                }
                let scale = g.drho.max_abs().max(g.du.abs()).max(1.0);
                assert!(dev < 1e-7 * scale, "hess identity dev={dev}");

                // Hessian symmetry.
                let h1 = random_dir(&mut rng, &spec);
                let h2 = random_dir(&mut rng, &spec);
                let hh1 = cache.hess_apply(&spec, &h1).unwrap();
                let hh2 = cache.hess_apply(&spec, &h2).unwrap();
                let d = (hh1.dot(&h2) - hh2.dot(&h1)).abs();
                assert!(d < 1e-8 * hh1.dot(&h1).abs().max(1.0), "symmetry dev={d}");

                // Third-order scaling: ∇³f(λx)[·,h,h] = λ^{-3} ∇³f(x)[·,h,h].
                let lam = 2.0;
                let xs = ConePoint {
                    u: lam * x.u,
                    rho: x.rho.scale_re(lam),
                    sigma: x.sigma.iter().map(|s| s.scale_re(lam)).collect(),
                };
                let cache_s = PointCache::build(&spec, xs).unwrap().unwrap();
                let t_x = cache.third_dir(&spec, &h1).unwrap();
                let t_s = cache_s.third_dir(&spec, &h1).unwrap();
                let dev3 = (t_s.dot(&h2) - t_x.dot(&h2) / lam.powi(3)).abs();
                assert!(dev3 < 1e-8 * t_x.dot(&h2).abs().max(1.0), "third scaling dev={dev3}");

                // Sampled self-concordance: |D³f[h,h,h]| ≤ 2 (D²f[h,h])^{3/2}.
                for _ in 0..25 {
                    let h = random_dir(&mut rng, &spec);
                    let d2 = cache.hess_apply(&spec, &h).unwrap().dot(&h);
                    let d3 = cache.third_dir(&spec, &h).unwrap().dot(&h);
                    assert!(d3.abs() <= 2.0 * d2.powf(1.5) + 1e-9, "self-concordance violated: |{d3}| > 2·{d2}^1.5");
                }
            }
        }
    }
}

#[test]
fn hypograph_concavity_midpoint() {
    // Ψ̂ is jointly concave on the implemented α range.
    let mut rng = R::seed_from_u64(37);
    for variant in [ConeVariant::True, ConeVariant::Fast] {
        let spec = random_spec(&mut rng, variant, 3, 2, 0.6);
        for _ in 0..10 {
            let x = random_interior(&mut rng, &spec);
            let y = random_interior(&mut rng, &spec);
            let mid = ConePoint {
                u: 0.0,
                rho: x.rho.add(&y.rho).scale_re(0.5),
                sigma: x.sigma.iter().zip(y.sigma.iter()).map(|(a, b)| a.add(b).scale_re(0.5)).collect(),
            };
            let pm = psi_hat(&spec, &mid.rho, &mid.sigma).unwrap();
            let px = psi_hat(&spec, &x.rho, &x.sigma).unwrap();
            let py = psi_hat(&spec, &y.rho, &y.sigma).unwrap();
            assert!(pm - 0.5 * (px + py) >= -1e-10, "concavity slack {}", pm - 0.5 * (px + py));
        }
    }
}

#[test]
fn reduction_invariant_under_unitary_rotation() {
    // Replacing (Ĝ, Ẑ, S) by a unitarily rotated reduction leaves Ψ̂ unchanged.
    let mut rng = R::seed_from_u64(41);
    let spec = random_spec(&mut rng, ConeVariant::True, 3, 3, 0.7);
    let k = spec.k_dim();
    let n = spec.zhat[0].out_dim();
    let uk = random_isometry(&mut rng, k, k);
    let un = random_isometry(&mut rng, n, n);
    let ghat2 = KrausMap::new(spec.ghat.kraus().iter().map(|m| uk.adjoint_mul(m)).collect()).unwrap();
    let zhat2 = KrausMap::new(spec.zhat[0].kraus().iter().map(|m| un.adjoint_mul(m)).collect()).unwrap();
    let s2 = un.adjoint_mul(&spec.s_blocks[0]).mul(&uk);
    let spec2 = ReducedConeSpec::new(spec.alpha, ConeVariant::True, ghat2, vec![zhat2], vec![s2]).unwrap();
    for _ in 0..5 {
        let x = random_interior(&mut rng, &spec);
        let p1 = psi_hat(&spec, &x.rho, &x.sigma).unwrap();
        let p2 = psi_hat(&spec2, &x.rho, &x.sigma).unwrap();
        assert!((p1 - p2).abs() < 1e-9 * p1.max(1.0), "p1={p1} p2={p2}");
    }
}

#[test]
fn initial_points_are_interior_and_central_when_unital() {
    let mut rng = R::seed_from_u64(53);
    // Unital fast example: identity Ĝ and a pinching Ẑ𝒢.
    let d = 4;
    let mut kraus0 = CMat::<f64>::zeros(2, d);
    kraus0[(0, 0)] = Complex::new(1.0, 0.0);
    kraus0[(1, 1)] = Complex::new(1.0, 0.0);
    let mut kraus1 = CMat::<f64>::zeros(2, d);
    kraus1[(0, 2)] = Complex::new(1.0, 0.0);
    kraus1[(1, 3)] = Complex::new(1.0, 0.0);
    let s0 = kraus0.adjoint();
    let s1 = kraus1.adjoint();
    let spec = ReducedConeSpec::new(
        0.6,
        ConeVariant::Fast,
        KrausMap::identity(d),
        vec![KrausMap::conjugation(kraus0), KrausMap::conjugation(kraus1)],
        vec![s0.adjoint(), s1.adjoint()],
    )
    .unwrap();
    let p = initial_point(&spec);
    let cache = PointCache::build(&spec, p.clone()).unwrap().expect("interior");
    // Central point: (u, ρ) = −∇f.
    let g = cache.gradient();
    let dev = (p.u + g.du).abs().max(p.rho.add(&g.drho).max_abs());
    assert!(dev < 1e-10, "central residual {dev}");

    // Non-unital random specs: interior is still guaranteed.
    for variant in [ConeVariant::True, ConeVariant::Fast] {
        for _ in 0..5 {
            let spec = random_spec(&mut rng, variant, 3, 2, 0.8);
            let p = initial_point(&spec);
            assert!(PointCache::build(&spec, p).unwrap().is_some());
        }
    }
}

#[test]
fn true_variant_initial_point_central_when_unital() {
    // Identity maps are unital; the Newton-derived (γ, δ) must solve x = −∇f.
    for &alpha in &[0.55f64, 0.75, 0.9] {
        let d = 3;
        let spec = ReducedConeSpec::new(
            alpha,
            ConeVariant::True,
            KrausMap::identity(d),
            vec![KrausMap::identity(d)],
            vec![CMat::identity(d)],
        )
        .unwrap();
        let p = initial_point(&spec);
        let cache = PointCache::build(&spec, p.clone()).unwrap().expect("interior");
        let g = cache.gradient();
        let mut dev: f64 = (p.u + g.du).abs();
        dev = dev.max(p.rho.add(&g.drho).max_abs());
        dev = dev.max(p.sigma[0].add(&g.dsigma[0]).max_abs());
        assert!(dev < 1e-9, "alpha={alpha} central residual {dev}");
    }
}

#[test]
fn non_interior_points_are_rejected() {
    let spec = ReducedConeSpec::new(
        0.7,
        ConeVariant::True,
        KrausMap::identity(2),
        vec![KrausMap::identity(2)],
        vec![CMat::<f64>::identity(2)],
    )
    .unwrap();
    // Indefinite ρ.
    let p = ConePoint { u: 5.0, rho: CMat::diag(&[1.0, -0.1]), sigma: vec![CMat::identity(2)] };
    assert!(PointCache::build(&spec, p).unwrap().is_none());
    // Gap violated: u too small.
    let p = ConePoint { u: -10.0, rho: CMat::identity(2), sigma: vec![CMat::identity(2)] };
    assert!(PointCache::build(&spec, p).unwrap().is_none());
}

#[test]
fn alpha_one_rejected() {
    let r = ReducedConeSpec::new(
        1.0,
        ConeVariant::Fast,
        KrausMap::<f64>::identity(2),
        vec![KrausMap::identity(2)],
        vec![CMat::identity(2)],
    );
    assert!(r.is_err());
}
