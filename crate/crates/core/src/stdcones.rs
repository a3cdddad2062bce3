//! Standard cone oracles: nonnegative orthant, positive semidefinite cone,
//! vector relative entropy (Kullback-Leibler) cone, logarithm cone, and the
//! L1-norm reformulation into linear constraints.

use crate::ipm::cone::BarrierOracle;
use crate::ipm::program::{AffineExpr, ProgramBuilder, VarBlock};
use crate::matfun::{eigh, svec_len, unsvec, CMat, SpectralDecomposition};
use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum StdConeError {
    #[error("L1 radius must be nonnegative, got {0}")]
    NegativeRadius(f64),
    #[error("dimension must be positive")]
    EmptyCone,
}

/// Descriptor for the standard cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StandardCone {
    /// `x ≥ 0` componentwise; barrier parameter d.
    Nonneg { dim: usize },
    /// Block-diagonal Hermitian PSD in svec coordinates; parameter Σ sides.
    Psd { block_dims: Vec<usize> },
    /// `{(u, q, p): u ≥ Σ qᵢ ln(qᵢ/pᵢ), q, p > 0}`; parameter 1 + 2d.
    Kl { dim: usize },
    /// `{(u, v, w): u ≤ v ln(w/v), v, w > 0}`; parameter 3.
    Log,
}

impl StandardCone {
    pub fn coord_dim(&self) -> usize {
        match self {
            StandardCone::Nonneg { dim } => *dim,
            StandardCone::Psd { block_dims } => block_dims.iter().map(|&d| svec_len(d)).sum(),
            StandardCone::Kl { dim } => 1 + 2 * dim,
            StandardCone::Log => 3,
        }
    }

    pub fn nu<T: Real>(&self) -> T {
        let n = match self {
            StandardCone::Nonneg { dim } => *dim,
            StandardCone::Psd { block_dims } => block_dims.iter().sum(),
            StandardCone::Kl { dim } => 1 + 2 * dim,
            StandardCone::Log => 3,
        };
        T::from_usize(n).unwrap()
    }

    /// Instantiate the barrier oracle for one solve.
    pub fn cone_oracle<T: Real>(&self) -> Box<dyn BarrierOracle<T>> {
        match self {
            StandardCone::Nonneg { dim } => Box::new(NonnegOracle::new(*dim)),
            StandardCone::Psd { block_dims } => Box::new(PsdOracle::new(block_dims.clone())),
            StandardCone::Kl { dim } => Box::new(KlOracle::new(*dim)),
            StandardCone::Log => Box::new(LogOracle::new()),
        }
    }
}

// ---------------------------------------------------------------------------
// Nonnegative orthant.

struct NonnegOracle<T: Real> {
    x: Vec<T>,
}

impl<T: Real> NonnegOracle<T> {
    fn new(dim: usize) -> Self {
        NonnegOracle { x: vec![T::one(); dim] }
    }
}

impl<T: Real> BarrierOracle<T> for NonnegOracle<T> {
    fn dim(&self) -> usize {
        self.x.len()
    }
    fn nu(&self) -> T {
        T::from_usize(self.x.len()).unwrap()
    }
    fn initial_point(&self, out: &mut [T]) {
        out.fill(T::one());
    }
    fn is_interior(&self, x: &[T]) -> bool {
        x.iter().all(|&v| v > T::zero())
    }
    fn set_point(&mut self, x: &[T]) -> bool {
        if !self.is_interior(x) {
            return false;
        }
        self.x.copy_from_slice(x);
        true
    }
    fn value(&self) -> T {
        -self.x.iter().map(|&v| v.ln()).sum::<T>()
    }
    fn gradient(&self, out: &mut [T]) {
        for (o, &v) in out.iter_mut().zip(self.x.iter()) {
            *o = -v.recip();
        }
    }
    fn hess_apply(&self, h: &[T], out: &mut [T]) {
        for ((o, &v), &hi) in out.iter_mut().zip(self.x.iter()).zip(h.iter()) {
            *o = hi / (v * v);
        }
    }
    fn third_dir(&self, h: &[T], out: &mut [T]) {
        for ((o, &v), &hi) in out.iter_mut().zip(self.x.iter()).zip(h.iter()) {
            *o = -T::of(2.0) * hi * hi / (v * v * v);
        }
    }
    fn dense_hessian(&self, out: &mut [T]) {
        out.fill(T::zero());
        let n = self.x.len();
        for (i, &v) in self.x.iter().enumerate() {
            out[i * n + i] = (v * v).recip();
        }
    }
}

// ---------------------------------------------------------------------------
// PSD cone over block-diagonal Hermitian matrices.

struct PsdOracle<T: Real> {
    block_dims: Vec<usize>,
    inv: Vec<CMat<T>>,
    logdet: T,
}

impl<T: Real> PsdOracle<T> {
    fn new(block_dims: Vec<usize>) -> Self {
        PsdOracle {
            inv: block_dims.iter().map(|&d| CMat::identity(d)).collect(),
            logdet: T::zero(),
            block_dims,
        }
    }

    fn decompose(&self, x: &[T]) -> Option<Vec<SpectralDecomposition<T>>> {
        let mut eigs = Vec::with_capacity(self.block_dims.len());
        let mut off = 0;
        for &d in &self.block_dims {
            let len = svec_len(d);
            let m = unsvec(&x[off..off + len], d);
            let sd = eigh(&m).ok()?;
            if !(sd.min_eigenvalue() > T::zero()) {
                return None;
            }
            eigs.push(sd);
            off += len;
        }
        Some(eigs)
    }
}

impl<T: Real> BarrierOracle<T> for PsdOracle<T> {
    fn dim(&self) -> usize {
        self.block_dims.iter().map(|&d| svec_len(d)).sum()
    }
    fn nu(&self) -> T {
        T::from_usize(self.block_dims.iter().sum()).unwrap()
    }
    fn initial_point(&self, out: &mut [T]) {
        let blocks: Vec<CMat<T>> = self.block_dims.iter().map(|&d| CMat::identity(d)).collect();
        let v = crate::matfun::svec_blocks(&blocks);
        out.copy_from_slice(&v);
    }
    fn is_interior(&self, x: &[T]) -> bool {
        self.decompose(x).is_some()
    }
    fn set_point(&mut self, x: &[T]) -> bool {
        let Some(eigs) = self.decompose(x) else { return false };
        self.logdet = T::zero();
        self.inv.clear();
        for sd in &eigs {
            for &l in &sd.eigenvalues {
                self.logdet = self.logdet + l.ln();
            }
            let inv_vals: Vec<T> = sd.eigenvalues.iter().map(|&l| l.recip()).collect();
            self.inv.push(sd.apply_values(&inv_vals));
        }
        true
    }
    fn value(&self) -> T {
        -self.logdet
    }
    fn gradient(&self, out: &mut [T]) {
        let blocks: Vec<CMat<T>> = self.inv.iter().map(|m| m.scale_re(-T::one())).collect();
        out.copy_from_slice(&crate::matfun::svec_blocks(&blocks));
    }
    fn hess_apply(&self, h: &[T], out: &mut [T]) {
        let hm = crate::matfun::unsvec_blocks(h, &self.block_dims);
        let blocks: Vec<CMat<T>> =
            self.inv.iter().zip(hm.iter()).map(|(inv, hb)| hb.congruence(inv).herm_part()).collect();
        out.copy_from_slice(&crate::matfun::svec_blocks(&blocks));
    }
    fn third_dir(&self, h: &[T], out: &mut [T]) {
        let hm = crate::matfun::unsvec_blocks(h, &self.block_dims);
        let blocks: Vec<CMat<T>> = self
            .inv
            .iter()
            .zip(hm.iter())
            .map(|(inv, hb)| inv.mul(hb).mul(inv).mul(hb).mul(inv).herm_part().scale_re(-T::of(2.0)))
            .collect();
        out.copy_from_slice(&crate::matfun::svec_blocks(&blocks));
    }
}

// ---------------------------------------------------------------------------
// Vector relative entropy cone: (u, q, p), u ≥ Σ qᵢ ln(qᵢ/pᵢ).

struct KlOracle<T: Real> {
    d: usize,
    q: Vec<T>,
    p: Vec<T>,
    gap: T,
    start: Vec<T>,
}

impl<T: Real> KlOracle<T> {
    fn new(d: usize) -> Self {
        let mut s = KlOracle {
            d,
            q: vec![T::one(); d],
            p: vec![T::one(); d],
            gap: T::one(),
            start: Vec::new(),
        };
        let mut start = vec![T::one(); 1 + 2 * d];
        start[0] = T::one();
        s.start = polish_central(&mut s, start.clone()).unwrap_or(start);
        let ok = s.set_point(&s.start.clone());
        debug_assert!(ok);
        s
    }

    fn kl(&self, x: &[T]) -> Option<(T, Vec<T>, Vec<T>)> {
        let d = self.d;
        let u = x[0];
        let q = x[1..1 + d].to_vec();
        let p = x[1 + d..1 + 2 * d].to_vec();
        if q.iter().any(|&v| !(v > T::zero())) || p.iter().any(|&v| !(v > T::zero())) {
            return None;
        }
        let mut div = T::zero();
        for i in 0..d {
            div = div + q[i] * (q[i] / p[i]).ln();
        }
        let gap = u - div;
        if !(gap > T::zero()) {
            return None;
        }
        Some((gap, q, p))
    }
}

impl<T: Real> BarrierOracle<T> for KlOracle<T> {
    fn dim(&self) -> usize {
        1 + 2 * self.d
    }
    fn nu(&self) -> T {
        T::from_usize(1 + 2 * self.d).unwrap()
    }
    fn initial_point(&self, out: &mut [T]) {
        out.copy_from_slice(&self.start);
    }
    fn is_interior(&self, x: &[T]) -> bool {
        self.kl(x).is_some()
    }
    fn set_point(&mut self, x: &[T]) -> bool {
        let Some((gap, q, p)) = self.kl(x) else { return false };
        self.q = q;
        self.p = p;
        self.gap = gap;
        true
    }
    fn value(&self) -> T {
        let mut v = -self.gap.ln();
        for i in 0..self.d {
            v = v - self.q[i].ln() - self.p[i].ln();
        }
        v
    }
    fn gradient(&self, out: &mut [T]) {
        let z = self.gap;
        out[0] = -z.recip();
        for i in 0..self.d {
            let lr = (self.q[i] / self.p[i]).ln();
            out[1 + i] = (lr + T::one()) / z - self.q[i].recip();
            out[1 + self.d + i] = -(self.q[i] / self.p[i]) / z - self.p[i].recip();
        }
    }
    fn hess_apply(&self, h: &[T], out: &mut [T]) {
        let d = self.d;
        let z = self.gap;
        let (hu, hq, hp) = (h[0], &h[1..1 + d], &h[1 + d..1 + 2 * d]);
        let mut dz = hu;
        for i in 0..d {
            let lr = (self.q[i] / self.p[i]).ln();
            dz = dz - (lr + T::one()) * hq[i] + (self.q[i] / self.p[i]) * hp[i];
        }
        let z2 = z * z;
        out[0] = dz / z2;
        for i in 0..d {
            let lr = (self.q[i] / self.p[i]).ln();
            let d2z_q = -(hq[i] / self.q[i] - hp[i] / self.p[i]);
            let d2z_p = hq[i] / self.p[i] - self.q[i] * hp[i] / (self.p[i] * self.p[i]);
            out[1 + i] = -dz / z2 * (lr + T::one()) - d2z_q / z + hq[i] / (self.q[i] * self.q[i]);
            out[1 + d + i] =
                dz / z2 * (self.q[i] / self.p[i]) - d2z_p / z + hp[i] / (self.p[i] * self.p[i]);
        }
    }
    fn third_dir(&self, h: &[T], out: &mut [T]) {
        let d = self.d;
        let z = self.gap;
        let two = T::of(2.0);
        let (hu, hq, hp) = (h[0], &h[1..1 + d], &h[1 + d..1 + 2 * d]);
        let mut dz = hu;
        let mut d2z = T::zero();
        let mut d2z_q = vec![T::zero(); d];
        let mut d2z_p = vec![T::zero(); d];
        for i in 0..d {
            let lr = (self.q[i] / self.p[i]).ln();
            dz = dz - (lr + T::one()) * hq[i] + (self.q[i] / self.p[i]) * hp[i];
            d2z_q[i] = -(hq[i] / self.q[i] - hp[i] / self.p[i]);
            d2z_p[i] = hq[i] / self.p[i] - self.q[i] * hp[i] / (self.p[i] * self.p[i]);
            d2z = d2z + hq[i] * d2z_q[i] + hp[i] * d2z_p[i];
        }
        let z2 = z * z;
        let z3 = z2 * z;
        out[0] = -two * dz * dz / z3 + d2z / z2;
        for i in 0..d {
            let lr = (self.q[i] / self.p[i]).ln();
            let gz_q = -(lr + T::one());
            let gz_p = self.q[i] / self.p[i];
            // ∇³z[·,h,h] = −∇³D[·,h,h]: q-slot: hq²/q² − hp²/p²; p-slot: −2 hq hp/p² + 2 q hp²/p³.
            let d3z_q = hq[i] * hq[i] / (self.q[i] * self.q[i]) - hp[i] * hp[i] / (self.p[i] * self.p[i]);
            let d3z_p = -two * hq[i] * hp[i] / (self.p[i] * self.p[i])
                + two * self.q[i] * hp[i] * hp[i] / (self.p[i] * self.p[i] * self.p[i]);
            out[1 + i] = two * dz / z2 * d2z_q[i] - two * dz * dz / z3 * gz_q - d3z_q / z
                + d2z / z2 * gz_q
                - two * hq[i] * hq[i] / (self.q[i] * self.q[i] * self.q[i]);
            out[1 + d + i] = two * dz / z2 * d2z_p[i] - two * dz * dz / z3 * gz_p - d3z_p / z
                + d2z / z2 * gz_p
                - two * hp[i] * hp[i] / (self.p[i] * self.p[i] * self.p[i]);
        }
    }
}

// ---------------------------------------------------------------------------
// Logarithm cone: (u, v, w), u ≤ v ln(w/v).

struct LogOracle<T: Real> {
    v: T,
    w: T,
    gap: T,
    start: [T; 3],
}

impl<T: Real> LogOracle<T> {
    fn new() -> Self {
        let e = T::of(std::f64::consts::E);
        let mut s = LogOracle { v: T::one(), w: e, gap: T::of(2.0), start: [-T::one(), T::one(), e] };
        let start = vec![-T::one(), T::one(), e];
        if let Some(p) = polish_central(&mut s, start) {
            s.start = [p[0], p[1], p[2]];
        }
        let st = s.start;
        let ok = s.set_point(&st);
        debug_assert!(ok);
        s
    }

    fn gap_of(x: &[T]) -> Option<T> {
        let (u, v, w) = (x[0], x[1], x[2]);
        if !(v > T::zero() && w > T::zero()) {
            return None;
        }
        let gap = v * (w / v).ln() - u;
        if gap > T::zero() {
            Some(gap)
        } else {
            None
        }
    }
}

impl<T: Real> BarrierOracle<T> for LogOracle<T> {
    fn dim(&self) -> usize {
        3
    }
    fn nu(&self) -> T {
        T::of(3.0)
    }
    fn initial_point(&self, out: &mut [T]) {
        out.copy_from_slice(&self.start);
    }
    fn is_interior(&self, x: &[T]) -> bool {
        Self::gap_of(x).is_some()
    }
    fn set_point(&mut self, x: &[T]) -> bool {
        let Some(gap) = Self::gap_of(x) else { return false };
        self.v = x[1];
        self.w = x[2];
        self.gap = gap;
        true
    }
    fn value(&self) -> T {
        -self.gap.ln() - self.v.ln() - self.w.ln()
    }
    fn gradient(&self, out: &mut [T]) {
        let z = self.gap;
        let lw = (self.w / self.v).ln();
        // z = v ln(w/v) − u; ∇z = (−1, ln(w/v) − 1, v/w).
        out[0] = z.recip();
        out[1] = -(lw - T::one()) / z - self.v.recip();
        out[2] = -(self.v / self.w) / z - self.w.recip();
    }
    fn hess_apply(&self, h: &[T], out: &mut [T]) {
        let z = self.gap;
        let (v, w) = (self.v, self.w);
        let lw = (w / v).ln();
        let gz = [-T::one(), lw - T::one(), v / w];
        let dz = gz[0] * h[0] + gz[1] * h[1] + gz[2] * h[2];
        let d2z = [T::zero(), -h[1] / v + h[2] / w, h[1] / w - v * h[2] / (w * w)];
        // ∇²F[h] = (∇z·h)/z² ∇z − ∇²z[h]/z + diag(0, 1/v², 1/w²) h.
        let z2 = z * z;
        out[0] = dz / z2 * gz[0];
        out[1] = dz / z2 * gz[1] - d2z[1] / z + h[1] / (v * v);
        out[2] = dz / z2 * gz[2] - d2z[2] / z + h[2] / (w * w);
    }
    fn third_dir(&self, h: &[T], out: &mut [T]) {
        let z = self.gap;
        let two = T::of(2.0);
        let (v, w) = (self.v, self.w);
        let lw = (w / v).ln();
        let gz = [-T::one(), lw - T::one(), v / w];
        let dz = gz[0] * h[0] + gz[1] * h[1] + gz[2] * h[2];
        let d2z = [T::zero(), -h[1] / v + h[2] / w, h[1] / w - v * h[2] / (w * w)];
        let d2z_hh = h[1] * d2z[1] + h[2] * d2z[2];
        // Third partials of z: z_vvv = 1/v², z_vww = −1/w², z_www = 2v/w³.
        let d3z = [
            T::zero(),
            h[1] * h[1] / (v * v) - h[2] * h[2] / (w * w),
            -two * h[1] * h[2] / (w * w) + two * v * h[2] * h[2] / (w * w * w),
        ];
        let z2 = z * z;
        let z3 = z2 * z;
        for i in 0..3 {
            out[i] = two * dz / z2 * d2z[i] - two * dz * dz / z3 * gz[i] - d3z[i] / z + d2z_hh / z2 * gz[i];
        }
        out[1] = out[1] - two * h[1] * h[1] / (v * v * v);
        out[2] = out[2] - two * h[2] * h[2] / (w * w * w);
    }
}

// ---------------------------------------------------------------------------
// Central-point polish shared by the small cones.

/// Damped Newton on `r(x) = x + ∇F(x)`; returns the central point or `None`.
fn polish_central<T: Real>(oracle: &mut dyn BarrierOracle<T>, start: Vec<T>) -> Option<Vec<T>> {
    let n = start.len();
    let mut x = start;
    if !oracle.set_point(&x) {
        return None;
    }
    for _ in 0..60 {
        let mut g = vec![T::zero(); n];
        oracle.gradient(&mut g);
        let r: Vec<T> = (0..n).map(|i| x[i] + g[i]).collect();
        let rn = r.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
        if rn < T::of(1e-12) {
            return Some(x);
        }
        let mut jac = vec![T::zero(); n * n];
        oracle.dense_hessian(&mut jac);
        for i in 0..n {
            jac[i * n + i] = jac[i * n + i] + T::one();
        }
        let mut rhs: Vec<T> = r.iter().map(|&v| -v).collect();
        if !gauss_solve(&mut jac, &mut rhs, n) {
            return None;
        }
        let mut step = T::one();
        let mut moved = false;
        for _ in 0..30 {
            let cand: Vec<T> = (0..n).map(|i| x[i] + step * rhs[i]).collect();
            if oracle.is_interior(&cand) && oracle.set_point(&cand) {
                x = cand;
                moved = true;
                break;
            }
            step = step * T::of(0.5);
        }
        if !moved {
            return None;
        }
    }
    None
}

/// In-place dense Gaussian elimination with partial pivoting.
pub(crate) fn gauss_solve<T: Real>(a: &mut [T], b: &mut [T], n: usize) -> bool {
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if !(best > T::zero()) {
            return false;
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        let diag = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / diag;
            if f == T::zero() {
                continue;
            }
            for c in col..n {
                let v = a[col * n + c];
                a[r * n + c] = a[r * n + c] - f * v;
            }
            let bv = b[col];
            b[r] = b[r] - f * bv;
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for c in col + 1..n {
            acc = acc - a[col * n + c] * b[c];
        }
        b[col] = acc / a[col * n + col];
    }
    true
}

// ---------------------------------------------------------------------------
// L1-ball reformulation.

/// Encode `‖expr‖₁ ≤ delta` with nonnegative slacks: allocates a block
/// `(t, a, b, s)` of `3d + 1` orthant variables and emits
/// `a − t − expr = 0`, `b − t + expr = 0`, `Σ t + s = delta`.
pub fn l1_reformulate<T: Real>(
    builder: &mut ProgramBuilder<T>,
    delta: T,
    exprs: &[AffineExpr<T>],
) -> Result<VarBlock, StdConeError> {
    if delta < T::zero() {
        return Err(StdConeError::NegativeRadius(delta.to_f64().unwrap_or(f64::NAN)));
    }
    let d = exprs.len();
    if d == 0 {
        return Err(StdConeError::EmptyCone);
    }
    let block = builder.add_standard_cone(StandardCone::Nonneg { dim: 3 * d + 1 });
    let t0 = block.start;
    let a0 = block.start + d;
    let b0 = block.start + 2 * d;
    let s = block.start + 3 * d;
    for (i, e) in exprs.iter().enumerate() {
        // a_i − t_i − expr_i = 0  →  a_i − t_i − Σ terms = const.
        let mut row = vec![(a0 + i, T::one()), (t0 + i, -T::one())];
        for &(j, c) in &e.terms {
            row.push((j, -c));
        }
        builder.add_row(row, e.constant);
        // b_i − t_i + expr_i = 0  →  b_i − t_i + Σ terms = −const.
        let mut row = vec![(b0 + i, T::one()), (t0 + i, -T::one())];
        for &(j, c) in &e.terms {
            row.push((j, c));
        }
        builder.add_row(row, -e.constant);
    }
    let mut row: Vec<(usize, T)> = (0..d).map(|i| (t0 + i, T::one())).collect();
    row.push((s, T::one()));
    builder.add_row(row, delta);
    Ok(block)
}
