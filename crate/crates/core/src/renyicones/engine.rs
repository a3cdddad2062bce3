//! Barrier value, gradient, Hessian action, and third-order directional
//! derivative for the Rényi cones.
//!
//! Everything is evaluated through the full-rank arrangement
//! `Ψ̂ = Tr[(Z_S^{1/2} G Z_S^{1/2})^α]` with `G = Ĝ(ρ)`,
//! `Z_S = Σ_j S_j† h(Z_j) S_j`, `h(x) = x^{(1−α)/α}`, so every spectral
//! function sees a positive definite argument. The eigendecompositions of
//! `M₁ = Z_S^{1/2} G Z_S^{1/2}` and `M₂ = G^{1/2} Z_S G^{1/2}` play the role
//! of the singular value decomposition of `Z_S^{1/2} G^{1/2}`: they share its
//! squared singular values and provide its left/right bases.

use super::spec::{ConeVariant, ReducedConeSpec};
use super::ConeError;
use crate::matfun::dd::{PowerFn, ScaledPowerFn};
use crate::matfun::ScalarFn;
use crate::matfun::frechet::{d2frechet_rotated, d3frechet_rotated, dfrechet_rotated, rotate_into, rotate_outof};
use crate::matfun::{eigh, CMat, Dd1Table, Dd2Table, SpectralDecomposition};
use crate::scalar::Real;

/// A point of the cone. `sigma` stays empty for the fast variant.
#[derive(Debug, Clone)]
pub struct ConePoint<T: Real> {
    pub u: T,
    pub rho: CMat<T>,
    pub sigma: Vec<CMat<T>>,
}

/// A tangent direction, laid out like a point.
#[derive(Debug, Clone)]
pub struct ConeDir<T: Real> {
    pub du: T,
    pub drho: CMat<T>,
    pub dsigma: Vec<CMat<T>>,
}

impl<T: Real> ConeDir<T> {
    pub fn zeros_like(point: &ConePoint<T>) -> Self {
        ConeDir {
            du: T::zero(),
            drho: CMat::zeros(point.rho.rows(), point.rho.rows()),
            dsigma: point.sigma.iter().map(|s| CMat::zeros(s.rows(), s.rows())).collect(),
        }
    }

    pub fn scale(&self, a: T) -> Self {
        ConeDir {
            du: self.du * a,
            drho: self.drho.scale_re(a),
            dsigma: self.dsigma.iter().map(|s| s.scale_re(a)).collect(),
        }
    }

    /// Euclidean inner product in the isometric real coordinates.
    pub fn dot(&self, other: &Self) -> T {
        let mut acc = self.du * other.du + self.drho.hs_inner(&other.drho).re;
        for (a, b) in self.dsigma.iter().zip(other.dsigma.iter()) {
            acc = acc + a.hs_inner(b).re;
        }
        acc
    }
}

struct EigWith<T: Real> {
    sqrt: CMat<T>,
    isqrt: CMat<T>,
    inv: CMat<T>,
    logdet: T,
}

fn eig_with<T: Real>(m: &CMat<T>) -> Result<Option<EigWith<T>>, ConeError> {
    let sd = eigh(m)?;
    if !(sd.min_eigenvalue() > T::zero()) {
        return Ok(None);
    }
    let n = sd.dim();
    let mut sqrt_vals = Vec::with_capacity(n);
    let mut isqrt_vals = Vec::with_capacity(n);
    let mut inv_vals = Vec::with_capacity(n);
    let mut logdet = T::zero();
    for &l in &sd.eigenvalues {
        sqrt_vals.push(l.sqrt());
        isqrt_vals.push(l.sqrt().recip());
        inv_vals.push(l.recip());
        logdet = logdet + l.ln();
    }
    Ok(Some(EigWith {
        sqrt: sd.apply_values(&sqrt_vals),
        isqrt: sd.apply_values(&isqrt_vals),
        inv: sd.apply_values(&inv_vals),
        logdet,
    }))
}

/// Spectral data plus divided-difference tables of one scalar function.
struct FnTables<T: Real> {
    t1: Dd1Table<T>,
    t2: Dd2Table<T>,
}

struct ZBlock<T: Real> {
    sd: SpectralDecomposition<T>,
    h_mat: CMat<T>,
    h_tabs: FnTables<T>,
}

struct MTables<T: Real> {
    sd: SpectralDecomposition<T>,
    gp_vals: Vec<T>,
    gp: FnTables<T>,
    gt: FnTables<T>,
}

/// Everything computed once per interior point and reused across barrier,
/// gradient, Hessian, and third-order calls.
pub struct PointCache<T: Real> {
    pub point: ConePoint<T>,
    variant: ConeVariant,
    s_alpha: T,

    rho_eig: EigWith<T>,
    sigma_eig: Vec<EigWith<T>>,

    g_eig: EigWith<T>,
    z_blocks: Vec<ZBlock<T>>,
    zs_eig: EigWith<T>,
    m1: MTables<T>,
    m2: MTables<T>,

    pub psi: T,
    /// `z = u − s_α Ψ̂`, the barrier gap.
    pub gap: T,

    grad_psi_rho: CMat<T>,
    grad_psi_sigma: Vec<CMat<T>>,
    /// `Q_j = S_j G^{1/2} g'(M₂) G^{1/2} S_j†`.
    q_blocks: Vec<CMat<T>>,
}

struct Funcs<T: Real> {
    g: PowerFn<T>,
    gp: ScaledPowerFn<T>,
    gt: ScaledPowerFn<T>,
    h: PowerFn<T>,
}

fn funcs<T: Real>(alpha: T) -> Funcs<T> {
    Funcs {
        g: PowerFn::new(alpha),
        gp: ScaledPowerFn { coeff: alpha, p: alpha - T::one() },
        gt: ScaledPowerFn { coeff: alpha, p: alpha },
        h: PowerFn::new((T::one() - alpha) / alpha),
    }
}

fn build_fn_tables<T: Real, F: crate::matfun::ScalarFn<T>>(f: &F, lams: &[T]) -> FnTables<T> {
    FnTables { t1: Dd1Table::build(f, lams), t2: Dd2Table::build(f, lams) }
}

impl<T: Real> PointCache<T> {
    /// Build the cache; `None` when the point is not in the cone interior.
    pub fn build(spec: &ReducedConeSpec<T>, point: ConePoint<T>) -> Result<Option<Self>, ConeError> {
        let fs = funcs(spec.alpha);
        let s_alpha = spec.s_alpha();

        let Some(rho_eig) = eig_with(&point.rho)? else { return Ok(None) };
        let mut sigma_eig = Vec::with_capacity(point.sigma.len());
        if matches!(spec.variant, ConeVariant::True) {
            if point.sigma.len() != spec.zhat.len() {
                return Err(ConeError::Inconsistent(format!(
                    "point has {} sigma blocks, spec wants {}",
                    point.sigma.len(),
                    spec.zhat.len()
                )));
            }
            for s in &point.sigma {
                let Some(e) = eig_with(s)? else { return Ok(None) };
                sigma_eig.push(e);
            }
        }

        let g_mat = spec.ghat.apply(&point.rho)?.herm_part();
        let Some(g_eig) = eig_with(&g_mat)? else { return Ok(None) };

        let mut z_blocks = Vec::with_capacity(spec.zhat.len());
        for (j, zmap) in spec.zhat.iter().enumerate() {
            let arg = match spec.variant {
                ConeVariant::True => &point.sigma[j],
                ConeVariant::Fast => &point.rho,
            };
            let z_mat = zmap.apply(arg)?.herm_part();
            let sd = eigh(&z_mat)?;
            if !(sd.min_eigenvalue() > T::zero()) {
                return Ok(None);
            }
            let h_vals: Vec<T> = sd.eigenvalues.iter().map(|&x| fs.h.f(x)).collect();
            let h_mat = sd.apply_values(&h_vals);
            let h_tabs = build_fn_tables(&fs.h, &sd.eigenvalues);
            z_blocks.push(ZBlock { sd, h_mat, h_tabs });
        }

        // Z_S = Σ_j S_j† h(Z_j) S_j.
        let k = spec.k_dim();
        let mut zs = CMat::<T>::zeros(k, k);
        for (zb, s) in z_blocks.iter().zip(spec.s_blocks.iter()) {
            zs = zs.add(&zb.h_mat.congruence_adjoint(s));
        }
        let zs = zs.herm_part();
        let Some(zs_eig) = eig_with(&zs)? else { return Ok(None) };

        let m1_mat = point_m(&zs_eig.sqrt, &g_mat);
        let m1_sd = eigh(&m1_mat)?;
        if !(m1_sd.min_eigenvalue() > T::zero()) {
            return Ok(None);
        }
        let m2_mat = point_m(&g_eig.sqrt, &zs);
        let m2_sd = eigh(&m2_mat)?;
        if !(m2_sd.min_eigenvalue() > T::zero()) {
            return Ok(None);
        }

        let psi: T = m1_sd.eigenvalues.iter().map(|&x| fs.g.f(x)).sum();
        let gap = point.u - s_alpha * psi;
        if !(gap > T::zero()) {
            return Ok(None);
        }

        let m1 = MTables {
            gp_vals: m1_sd.eigenvalues.iter().map(|&x| fs.gp.f(x)).collect(),
            gp: build_fn_tables(&fs.gp, &m1_sd.eigenvalues),
            gt: build_fn_tables(&fs.gt, &m1_sd.eigenvalues),
            sd: m1_sd,
        };
        let m2 = MTables {
            gp_vals: m2_sd.eigenvalues.iter().map(|&x| fs.gp.f(x)).collect(),
            gp: build_fn_tables(&fs.gp, &m2_sd.eigenvalues),
            gt: build_fn_tables(&fs.gt, &m2_sd.eigenvalues),
            sd: m2_sd,
        };

        // ∇ρ Ψ̂ = Ĝ†( Z_S^{1/2} U g'(Λ²) U† Z_S^{1/2} ).
        let gp_m1 = m1.sd.apply_values(&m1.gp_vals);
        let n1 = gp_m1.congruence(&zs_eig.sqrt).herm_part();
        let grad_psi_rho = spec.ghat.adjoint_apply(&n1)?.herm_part();

        // W₂ = G^{1/2} V g'(Λ²) V† G^{1/2}; Q_j = S_j W₂ S_j†;
        // ∇σ Ψ̂ |_j = Ẑ_j†( Dh(Z_j)[Q_j] ).
        let gp_m2 = m2.sd.apply_values(&m2.gp_vals);
        let w2 = gp_m2.congruence(&g_eig.sqrt).herm_part();
        let mut q_blocks = Vec::with_capacity(z_blocks.len());
        let mut grad_psi_sigma = Vec::with_capacity(z_blocks.len());
        for (j, zb) in z_blocks.iter().enumerate() {
            let qj = w2.congruence(&spec.s_blocks[j]).herm_part();
            let dh = apply_d1(&zb.sd, &zb.h_tabs.t1, &qj);
            grad_psi_sigma.push(spec.zhat[j].adjoint_apply(&dh)?.herm_part());
            q_blocks.push(qj);
        }

        Ok(Some(PointCache {
            point,
            variant: spec.variant,
            s_alpha,
            rho_eig,
            sigma_eig,
            g_eig,
            z_blocks,
            zs_eig,
            m1,
            m2,
            psi,
            gap,
            grad_psi_rho,
            grad_psi_sigma,
            q_blocks,
        }))
    }

    /// Barrier value `−ln(u − s_α Ψ̂) − logdet ρ − Σ logdet σ_j`.
    pub fn barrier(&self) -> T {
        let mut f = -self.gap.ln() - self.rho_eig.logdet;
        for e in &self.sigma_eig {
            f = f - e.logdet;
        }
        f
    }

    /// Gradient of Ψ̂ in the ρ slot (both contributions for the fast variant).
    pub fn psi_grad_rho(&self) -> CMat<T> {
        match self.variant {
            ConeVariant::True => self.grad_psi_rho.clone(),
            ConeVariant::Fast => {
                let mut g = self.grad_psi_rho.clone();
                for gs in &self.grad_psi_sigma {
                    g = g.add(gs);
                }
                g
            }
        }
    }

    /// Barrier gradient.
    pub fn gradient(&self) -> ConeDir<T> {
        let s = self.s_alpha;
        let z = self.gap;
        match self.variant {
            ConeVariant::True => ConeDir {
                du: -z.recip(),
                drho: self.grad_psi_rho.scale_re(s / z).sub(&self.rho_eig.inv),
                dsigma: self
                    .grad_psi_sigma
                    .iter()
                    .zip(self.sigma_eig.iter())
                    .map(|(g, e)| g.scale_re(s / z).sub(&e.inv))
                    .collect(),
            },
            ConeVariant::Fast => ConeDir {
                du: -z.recip(),
                drho: self.psi_grad_rho().scale_re(s / z).sub(&self.rho_eig.inv),
                dsigma: Vec::new(),
            },
        }
    }

    /// The four second-derivative actions of Ψ̂ on the lifted directions.
    ///
    /// Returns (ρρ·Hρ, σρ·Hρ per block, ρσ·Hσ, σσ·Hσ per block) before the
    /// `Ĝ†` / `Ẑ†` adjoints are applied to the σ-side pieces; all outputs are
    /// already pulled back to the ρ/σ slots.
    fn psi_hess_pieces(
        &self,
        spec: &ReducedConeSpec<T>,
        hrho: &CMat<T>,
        hsigma: &[CMat<T>],
    ) -> Result<PsiHess<T>, ConeError> {
        let fast = matches!(self.variant, ConeVariant::Fast);
        let hg = spec.ghat.apply(hrho)?.herm_part();
        let mut hz: Vec<CMat<T>> = Vec::with_capacity(self.z_blocks.len());
        for (j, zmap) in spec.zhat.iter().enumerate() {
            let arg = if fast { hrho } else { &hsigma[j] };
            hz.push(zmap.apply(arg)?.herm_part());
        }

        let zs_sq = &self.zs_eig.sqrt;
        let zs_is = &self.zs_eig.isqrt;
        let g_sq = &self.g_eig.sqrt;

        // X̃ = Z_S^{1/2} HG Z_S^{1/2}.
        let xt = hg.congruence(zs_sq);
        // Y = Σ_j S_j† Dh(Z_j)[HZ_j] S_j, and per-block Dh values.
        let k = spec.k_dim();
        let mut dh_hz: Vec<CMat<T>> = Vec::with_capacity(self.z_blocks.len());
        let mut y = CMat::<T>::zeros(k, k);
        for (j, zb) in self.z_blocks.iter().enumerate() {
            let d = apply_d1(&zb.sd, &zb.h_tabs.t1, &hz[j]);
            y = y.add(&d.congruence_adjoint(&spec.s_blocks[j]));
            dh_hz.push(d);
        }
        let y = y.herm_part();
        let yt = y.congruence(zs_is); // Ỹ = Z_S^{-1/2} Y Z_S^{-1/2}
        let yg = y.congruence(g_sq); // G^{1/2} Y G^{1/2}

        // ρρ: Ĝ†( Z_S^{1/2} Dg'(M₁)[X̃] Z_S^{1/2} ).
        let a_inner = apply_d1(&self.m1.sd, &self.m1.gp.t1, &xt).congruence(zs_sq);
        let hess_rr = spec.ghat.adjoint_apply(&a_inner.herm_part())?.herm_part();

        // σρ per block: Ẑ_j†( Dh(Z_j)[ S_j Z_S^{-1/2} Dg̃(M₁)[X̃] Z_S^{-1/2} S_j† ] ).
        let gt_xt = apply_d1(&self.m1.sd, &self.m1.gt.t1, &xt).congruence(zs_is).herm_part();
        let mut hess_sr = Vec::with_capacity(self.z_blocks.len());
        for (j, zb) in self.z_blocks.iter().enumerate() {
            let inner = gt_xt.congruence(&spec.s_blocks[j]);
            let d = apply_d1(&zb.sd, &zb.h_tabs.t1, &inner);
            hess_sr.push(spec.zhat[j].adjoint_apply(&d.herm_part())?.herm_part());
        }

        // ρσ: Ĝ†( Z_S^{1/2} Dg̃(M₁)[Ỹ] Z_S^{1/2} ).
        let c_inner = apply_d1(&self.m1.sd, &self.m1.gt.t1, &yt).congruence(zs_sq);
        let hess_rs = spec.ghat.adjoint_apply(&c_inner.herm_part())?.herm_part();

        // σσ per block:
        // Ẑ_j†( D²h(Z_j)[HZ_j, Q_j] + Dh(Z_j)[ S_j G^{1/2} Dg'(M₂)[Yg] G^{1/2} S_j† ] ).
        let gp_yg = apply_d1(&self.m2.sd, &self.m2.gp.t1, &yg).congruence(g_sq).herm_part();
        let mut hess_ss = Vec::with_capacity(self.z_blocks.len());
        for (j, zb) in self.z_blocks.iter().enumerate() {
            let term1 = apply_d2(&zb.sd, &zb.h_tabs.t2, &hz[j], &self.q_blocks[j]);
            let inner2 = gp_yg.congruence(&spec.s_blocks[j]);
            let term2 = apply_d1(&zb.sd, &zb.h_tabs.t1, &inner2);
            let total = term1.add(&term2).herm_part();
            hess_ss.push(spec.zhat[j].adjoint_apply(&total)?.herm_part());
        }

        Ok(PsiHess { hg, hz, xt, y, yt, yg, dh_hz, hess_rr, hess_sr, hess_rs, hess_ss })
    }

    /// Hessian of the barrier applied to a direction.
    pub fn hess_apply(&self, spec: &ReducedConeSpec<T>, dir: &ConeDir<T>) -> Result<ConeDir<T>, ConeError> {
        let s = self.s_alpha;
        let z = self.gap;
        let pieces = self.psi_hess_pieces(spec, &dir.drho, &dir.dsigma)?;
        match self.variant {
            ConeVariant::True => {
                let grho = &self.grad_psi_rho;
                let gam_rho = grho.hs_inner(&dir.drho).re;
                let mut gam_sig = T::zero();
                for (g, h) in self.grad_psi_sigma.iter().zip(dir.dsigma.iter()) {
                    gam_sig = gam_sig + g.hs_inner(h).re;
                }
                let dz = dir.du - s * (gam_rho + gam_sig);
                let du = dz / (z * z);
                let psi_rho = pieces.hess_rr.add(&pieces.hess_rs);
                let mut drho = grho.scale_re(-s * dz / (z * z));
                drho.axpy(s / z, &psi_rho);
                drho = drho.add(&dir.drho.congruence(&self.rho_eig.inv));
                let mut dsigma = Vec::with_capacity(dir.dsigma.len());
                for j in 0..dir.dsigma.len() {
                    let psi_sig = pieces.hess_sr[j].add(&pieces.hess_ss[j]);
                    let mut dsj = self.grad_psi_sigma[j].scale_re(-s * dz / (z * z));
                    dsj.axpy(s / z, &psi_sig);
                    dsj = dsj.add(&dir.dsigma[j].congruence(&self.sigma_eig[j].inv));
                    dsigma.push(dsj);
                }
                Ok(ConeDir { du, drho, dsigma })
            }
            ConeVariant::Fast => {
                let grho = self.psi_grad_rho();
                let gam = grho.hs_inner(&dir.drho).re;
                let dz = dir.du - s * gam;
                let du = dz / (z * z);
                let mut psi_rho = pieces.hess_rr.add(&pieces.hess_rs);
                for j in 0..self.z_blocks.len() {
                    psi_rho = psi_rho.add(&pieces.hess_sr[j]).add(&pieces.hess_ss[j]);
                }
                let mut drho = grho.scale_re(-s * dz / (z * z));
                drho.axpy(s / z, &psi_rho);
                drho = drho.add(&dir.drho.congruence(&self.rho_eig.inv));
                Ok(ConeDir { du, drho, dsigma: Vec::new() })
            }
        }
    }

    /// Third derivative of the barrier applied twice to the same direction,
    /// `∇³f(x)[·, h, h]`.
    pub fn third_dir(&self, spec: &ReducedConeSpec<T>, dir: &ConeDir<T>) -> Result<ConeDir<T>, ConeError> {
        let s = self.s_alpha;
        let z = self.gap;
        let pieces = self.psi_hess_pieces(spec, &dir.drho, &dir.dsigma)?;
        let fast = matches!(self.variant, ConeVariant::Fast);

        let zs_sq = &self.zs_eig.sqrt;
        let zs_is = &self.zs_eig.isqrt;
        let g_sq = &self.g_eig.sqrt;
        let g_is = &self.g_eig.isqrt;
        let k = spec.k_dim();

        // F = Σ_j S_j† D²h(Z_j)[HZ_j, HZ_j] S_j and its per-block pieces.
        let mut d2h_hh: Vec<CMat<T>> = Vec::with_capacity(self.z_blocks.len());
        let mut f_mat = CMat::<T>::zeros(k, k);
        for (j, zb) in self.z_blocks.iter().enumerate() {
            let d2 = apply_d2(&zb.sd, &zb.h_tabs.t2, &pieces.hz[j], &pieces.hz[j]);
            f_mat = f_mat.add(&d2.congruence_adjoint(&spec.s_blocks[j]));
            d2h_hh.push(d2);
        }
        let f_mat = f_mat.herm_part();
        let fg = f_mat.congruence(g_sq); // G^{1/2} F G^{1/2}
        let et = pieces.hg.congruence(g_is).herm_part(); // Ẽ = G^{-1/2} HG G^{-1/2}

        // ρ slot of ∇³Ψ[·,h,h]: Ĝ†( GGG + 2·GZG + GZZ ).
        let ggg = apply_d2(&self.m1.sd, &self.m1.gp.t2, &pieces.xt, &pieces.xt).congruence(zs_sq);
        let gzg = apply_d2(&self.m1.sd, &self.m1.gt.t2, &pieces.yt, &pieces.xt).congruence(zs_sq);
        let gzz_a = apply_d1(&self.m2.sd, &self.m2.gt.t1, &fg);
        let gzz_b = apply_d2(&self.m2.sd, &self.m2.gt.t2, &pieces.yg, &pieces.yg);
        let gzz = gzz_a.add(&gzz_b).congruence(g_is);
        let third_psi_rho_inner = ggg.add(&gzg.scale_re(T::of(2.0))).add(&gzz).herm_part();
        let third_psi_rho = spec.ghat.adjoint_apply(&third_psi_rho_inner)?.herm_part();

        // σ slot per block: Ẑ_j†( ZGG + 2·ZGZ + ZZZ ).
        let zgg_core = apply_d2(&self.m1.sd, &self.m1.gt.t2, &pieces.xt, &pieces.xt).congruence(zs_is).herm_part();
        let zgz_core_a = apply_d1(&self.m2.sd, &self.m2.gt.t1, &et).congruence(g_sq).herm_part();
        let zgz_core_b = apply_d2(&self.m2.sd, &self.m2.gt.t2, &et, &pieces.yg).congruence(g_sq).herm_part();
        let zzz_core_b = apply_d1(&self.m2.sd, &self.m2.gp.t1, &pieces.yg).congruence(g_sq).herm_part();
        let zzz_core_c = apply_d1(&self.m2.sd, &self.m2.gp.t1, &fg).congruence(g_sq).herm_part();
        let zzz_core_d = apply_d2(&self.m2.sd, &self.m2.gp.t2, &pieces.yg, &pieces.yg).congruence(g_sq).herm_part();

        let mut third_psi_sigma: Vec<CMat<T>> = Vec::with_capacity(self.z_blocks.len());
        for (j, zb) in self.z_blocks.iter().enumerate() {
            let sj = &spec.s_blocks[j];
            let hzj = &pieces.hz[j];
            let two = T::of(2.0);

            let zgg = apply_d1(&zb.sd, &zb.h_tabs.t1, &zgg_core.congruence(sj));
            let zgz = apply_d2(&zb.sd, &zb.h_tabs.t2, &zgz_core_a.congruence(sj), hzj)
                .add(&apply_d1(&zb.sd, &zb.h_tabs.t1, &zgz_core_b.congruence(sj)));
            let zzz = apply_d3(&zb.sd, &zb.h_tabs, &PowerFn::new((T::one() - spec.alpha) / spec.alpha), &self.q_blocks[j], hzj)
                .add(&apply_d2(&zb.sd, &zb.h_tabs.t2, hzj, &zzz_core_b.congruence(sj)).scale_re(two))
                .add(&apply_d1(&zb.sd, &zb.h_tabs.t1, &zzz_core_c.congruence(sj)))
                .add(&apply_d1(&zb.sd, &zb.h_tabs.t1, &zzz_core_d.congruence(sj)));

            let total = zgg.add(&zgz.scale_re(two)).add(&zzz).herm_part();
            third_psi_sigma.push(spec.zhat[j].adjoint_apply(&total)?.herm_part());
        }

        // Assemble the barrier's third directional derivative from the scalar
        // chain through z(x) = u − s Ψ̂.
        let (grho, gsig): (CMat<T>, Vec<CMat<T>>) = if fast {
            (self.psi_grad_rho(), Vec::new())
        } else {
            (self.grad_psi_rho.clone(), self.grad_psi_sigma.clone())
        };

        let gam_rho = grho.hs_inner(&dir.drho).re;
        let mut gam_sig = T::zero();
        for (g, h) in gsig.iter().zip(dir.dsigma.iter()) {
            gam_sig = gam_sig + g.hs_inner(h).re;
        }
        let dz = dir.du - s * (gam_rho + gam_sig);

        // ψ-Hessian actions pulled back per slot.
        let (psi_h_rho, psi_h_sigma): (CMat<T>, Vec<CMat<T>>) = if fast {
            let mut p = pieces.hess_rr.add(&pieces.hess_rs);
            for j in 0..self.z_blocks.len() {
                p = p.add(&pieces.hess_sr[j]).add(&pieces.hess_ss[j]);
            }
            (p, Vec::new())
        } else {
            (
                pieces.hess_rr.add(&pieces.hess_rs),
                (0..dir.dsigma.len())
                    .map(|j| pieces.hess_sr[j].add(&pieces.hess_ss[j]))
                    .collect(),
            )
        };
        let mut d2psi = psi_h_rho.hs_inner(&dir.drho).re;
        for (p, h) in psi_h_sigma.iter().zip(dir.dsigma.iter()) {
            d2psi = d2psi + p.hs_inner(h).re;
        }
        let d2z = -s * d2psi;

        let (third_rho_psi, third_sigma_psi): (CMat<T>, Vec<CMat<T>>) = if fast {
            let mut p = third_psi_rho;
            for t in third_psi_sigma {
                p = p.add(&t);
            }
            (p, Vec::new())
        } else {
            (third_psi_rho, third_psi_sigma)
        };

        let z2 = z * z;
        let z3 = z2 * z;
        let du = -T::of(2.0) * dz * dz / z3 + d2z / z2;

        let chain_rho = |gamma_grad: &CMat<T>, psi_h: &CMat<T>, third_psi: &CMat<T>, inv: &CMat<T>, hdir: &CMat<T>| {
            let mut out = psi_h.scale_re(-T::of(2.0) * s * dz / z2);
            out.axpy(T::of(2.0) * s * dz * dz / z3, gamma_grad);
            out.axpy(s / z, third_psi);
            out.axpy(-s * d2z / z2, gamma_grad);
            let w = inv.mul(hdir).mul(inv).mul(hdir).mul(inv);
            out.axpy(-T::of(2.0), &w.herm_part());
            out.herm_part()
        };

        let drho = chain_rho(&grho, &psi_h_rho, &third_rho_psi, &self.rho_eig.inv, &dir.drho);
        let dsigma: Vec<CMat<T>> = (0..dir.dsigma.len())
            .map(|j| {
                chain_rho(
                    &gsig[j],
                    &psi_h_sigma[j],
                    &third_sigma_psi[j],
                    &self.sigma_eig[j].inv,
                    &dir.dsigma[j],
                )
            })
            .collect();

        Ok(ConeDir { du, drho, dsigma })
    }
}

struct PsiHess<T: Real> {
    hg: CMat<T>,
    hz: Vec<CMat<T>>,
    xt: CMat<T>,
    #[allow(dead_code)]
    y: CMat<T>,
    yt: CMat<T>,
    yg: CMat<T>,
    #[allow(dead_code)]
    dh_hz: Vec<CMat<T>>,
    hess_rr: CMat<T>,
    hess_sr: Vec<CMat<T>>,
    hess_rs: CMat<T>,
    hess_ss: Vec<CMat<T>>,
}

fn point_m<T: Real>(sqrt_outer: &CMat<T>, inner: &CMat<T>) -> CMat<T> {
    inner.congruence(sqrt_outer).herm_part()
}

/// `Df(X)[H]` with precomputed spectral data and first-difference table.
fn apply_d1<T: Real>(sd: &SpectralDecomposition<T>, t1: &Dd1Table<T>, h: &CMat<T>) -> CMat<T> {
    let h_rot = rotate_into(&sd.unitary, h);
    rotate_outof(&sd.unitary, &dfrechet_rotated(t1, &h_rot))
}

/// `D²f(X)[H,K]`.
fn apply_d2<T: Real>(sd: &SpectralDecomposition<T>, t2: &Dd2Table<T>, h: &CMat<T>, k: &CMat<T>) -> CMat<T> {
    let h_rot = rotate_into(&sd.unitary, h);
    let k_rot = rotate_into(&sd.unitary, k);
    rotate_outof(&sd.unitary, &d2frechet_rotated(t2, &h_rot, &k_rot))
}

/// `D³f(X)[K, H, H]` (fully symmetric trilinear form as a matrix).
fn apply_d3<T: Real, F: crate::matfun::ScalarFn<T>>(
    sd: &SpectralDecomposition<T>,
    tabs: &FnTables<T>,
    f: &F,
    k: &CMat<T>,
    h: &CMat<T>,
) -> CMat<T> {
    let k_rot = rotate_into(&sd.unitary, k);
    let h_rot = rotate_into(&sd.unitary, h);
    rotate_outof(
        &sd.unitary,
        &d3frechet_rotated(f, &sd.eigenvalues, &tabs.t2, &k_rot, &h_rot, &h_rot),
    )
}

/// Evaluate `Ψ̂` at strictly positive arguments, without building a full
/// cache. `sigma` is ignored by the fast variant.
pub fn psi_hat<T: Real>(
    spec: &ReducedConeSpec<T>,
    rho: &CMat<T>,
    sigma: &[CMat<T>],
) -> Result<T, ConeError> {
    let point = ConePoint { u: T::zero(), rho: rho.clone(), sigma: sigma.to_vec() };
    // u = 0 may sit outside the cone; probe with a gap-irrelevant cache by
    // lifting u above s_α Ψ̂ anyway: build the chain manually instead.
    let fs = funcs(spec.alpha);
    let Some(_) = eig_with(&point.rho)? else { return Err(ConeError::NotInterior) };
    let g_mat = spec.ghat.apply(&point.rho)?.herm_part();
    let Some(g_eig) = eig_with(&g_mat)? else { return Err(ConeError::NotInterior) };
    let k = spec.k_dim();
    let mut zs = CMat::<T>::zeros(k, k);
    for (j, zmap) in spec.zhat.iter().enumerate() {
        let arg = match spec.variant {
            ConeVariant::True => &sigma[j],
            ConeVariant::Fast => &point.rho,
        };
        if matches!(spec.variant, ConeVariant::True) {
            let Some(_) = eig_with(arg)? else { return Err(ConeError::NotInterior) };
        }
        let z_mat = zmap.apply(arg)?.herm_part();
        let sd = eigh(&z_mat)?;
        if !(sd.min_eigenvalue() > T::zero()) {
            return Err(ConeError::NotInterior);
        }
        let h_vals: Vec<T> = sd.eigenvalues.iter().map(|&x| fs.h.f(x)).collect();
        zs = zs.add(&sd.apply_values(&h_vals).congruence_adjoint(&spec.s_blocks[j]));
    }
    let zs = zs.herm_part();
    let m2 = zs.congruence(&g_eig.sqrt).herm_part();
    let sd = eigh(&m2)?;
    if !(sd.min_eigenvalue() > T::zero()) {
        return Err(ConeError::NotInterior);
    }
    Ok(sd.eigenvalues.iter().map(|&x| fs.g.f(x)).sum())
}
