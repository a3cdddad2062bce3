//! Conic program container and builder.
//!
//! Standard form: minimize `c·x` subject to `A x = b` and `x ∈ K`, where `K`
//! is a product of cones whose coordinate blocks partition the variable
//! vector exactly. Affine couplings between cone blocks are expressed through
//! rows of `A`.

use super::cone::BarrierOracle;
use crate::renyicones::ReducedConeSpec;
use crate::scalar::Real;
use crate::stdcones::StandardCone;

/// One cone in the product.
#[derive(Debug, Clone)]
pub enum ConeSet<T: Real> {
    Standard(StandardCone),
    Renyi(Box<ReducedConeSpec<T>>),
}

impl<T: Real> ConeSet<T> {
    pub fn coord_dim(&self) -> usize {
        match self {
            ConeSet::Standard(c) => c.coord_dim(),
            ConeSet::Renyi(spec) => spec.coord_dim(),
        }
    }

    pub fn nu(&self) -> T {
        match self {
            ConeSet::Standard(c) => c.nu(),
            ConeSet::Renyi(spec) => spec.nu(),
        }
    }

    pub fn oracle(&self) -> Box<dyn BarrierOracle<T>> {
        match self {
            ConeSet::Standard(c) => c.cone_oracle(),
            ConeSet::Renyi(spec) => Box::new(crate::renyicones::oracle::RenyiOracle::new((**spec).clone())),
        }
    }
}

/// Contiguous variable range owned by one cone.
#[derive(Debug, Clone, Copy)]
pub struct VarBlock {
    pub start: usize,
    pub len: usize,
}

impl VarBlock {
    pub fn index(&self, offset: usize) -> usize {
        debug_assert!(offset < self.len);
        self.start + offset
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

/// Affine expression `Σ coeffᵢ x_{idxᵢ} + constant`.
#[derive(Debug, Clone)]
pub struct AffineExpr<T> {
    pub terms: Vec<(usize, T)>,
    pub constant: T,
}

impl<T: Real> AffineExpr<T> {
    pub fn zero() -> Self {
        AffineExpr { terms: Vec::new(), constant: T::zero() }
    }

    pub fn var(idx: usize) -> Self {
        AffineExpr { terms: vec![(idx, T::one())], constant: T::zero() }
    }

    pub fn constant(c: T) -> Self {
        AffineExpr { terms: Vec::new(), constant: c }
    }

    pub fn push(&mut self, idx: usize, coeff: T) {
        self.terms.push((idx, coeff));
    }

    pub fn eval(&self, x: &[T]) -> T {
        let mut acc = self.constant;
        for &(i, c) in &self.terms {
            acc = acc + c * x[i];
        }
        acc
    }
}

/// Assembled conic program.
#[derive(Debug, Clone)]
pub struct ConicProgram<T: Real> {
    pub cones: Vec<ConeSet<T>>,
    pub offsets: Vec<usize>,
    pub n: usize,
    pub c: Vec<T>,
    pub rows: Vec<Vec<(usize, T)>>,
    pub b: Vec<T>,
}

impl<T: Real> ConicProgram<T> {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn total_nu(&self) -> T {
        self.cones.iter().fold(T::zero(), |acc, c| acc + c.nu())
    }

    /// `A x` into `out`.
    pub fn a_mul(&self, x: &[T], out: &mut [T]) {
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc = T::zero();
            for &(j, v) in row {
                acc = acc + v * x[j];
            }
            out[r] = acc;
        }
    }

    /// `Aᵀ y` into `out`.
    pub fn at_mul(&self, y: &[T], out: &mut [T]) {
        out.fill(T::zero());
        for (r, row) in self.rows.iter().enumerate() {
            let yr = y[r];
            if yr == T::zero() {
                continue;
            }
            for &(j, v) in row {
                out[j] = out[j] + v * yr;
            }
        }
    }
}

/// Incremental builder; cone blocks allocate variables, rows couple them.
pub struct ProgramBuilder<T: Real> {
    cones: Vec<ConeSet<T>>,
    offsets: Vec<usize>,
    n: usize,
    obj: Vec<(usize, T)>,
    rows: Vec<Vec<(usize, T)>>,
    b: Vec<T>,
}

impl<T: Real> Default for ProgramBuilder<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> ProgramBuilder<T> {
    pub fn new() -> Self {
        ProgramBuilder { cones: Vec::new(), offsets: Vec::new(), n: 0, obj: Vec::new(), rows: Vec::new(), b: Vec::new() }
    }

    pub fn add_standard_cone(&mut self, cone: StandardCone) -> VarBlock {
        self.add_cone(ConeSet::Standard(cone))
    }

    pub fn add_renyi_cone(&mut self, spec: ReducedConeSpec<T>) -> VarBlock {
        self.add_cone(ConeSet::Renyi(Box::new(spec)))
    }

    pub fn add_cone(&mut self, cone: ConeSet<T>) -> VarBlock {
        let len = cone.coord_dim();
        let block = VarBlock { start: self.n, len };
        self.offsets.push(self.n);
        self.n += len;
        self.cones.push(cone);
        block
    }

    /// `Σ coeff x = rhs`. Coefficients on the same variable are merged.
    pub fn add_row(&mut self, terms: Vec<(usize, T)>, rhs: T) {
        let mut merged: Vec<(usize, T)> = Vec::with_capacity(terms.len());
        for (j, v) in terms {
            if v == T::zero() {
                continue;
            }
            if let Some(e) = merged.iter_mut().find(|e| e.0 == j) {
                e.1 = e.1 + v;
            } else {
                merged.push((j, v));
            }
        }
        merged.sort_by_key(|e| e.0);
        self.rows.push(merged);
        self.b.push(rhs);
    }

    /// Pin `expr = rhs`.
    pub fn add_expr_row(&mut self, expr: &AffineExpr<T>, rhs: T) {
        self.add_row(expr.terms.clone(), rhs - expr.constant);
    }

    pub fn objective_term(&mut self, idx: usize, coeff: T) {
        self.obj.push((idx, coeff));
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn finish(self) -> ConicProgram<T> {
        let mut c = vec![T::zero(); self.n];
        for (j, v) in self.obj {
            c[j] = c[j] + v;
        }
        for row in &self.rows {
            for &(j, _) in row {
                assert!(j < self.n, "row references variable {j} out of {}", self.n);
            }
        }
        ConicProgram { cones: self.cones, offsets: self.offsets, n: self.n, c, rows: self.rows, b: self.b }
    }
}
