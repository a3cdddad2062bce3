//! Scalar functions and their divided differences up to third order.
//!
//! Divided differences drive every Fréchet derivative in this crate. Nearly
//! coincident arguments switch to analytic derivative limits below a relative
//! threshold of 1e-10; power functions additionally use an expm1/log1p kernel
//! for moderately close arguments to dodge cancellation.

use crate::scalar::Real;

/// Relative coincidence threshold for divided differences.
pub fn coincidence_tol<T: Real>() -> T {
    T::of(1e-10)
}

/// A scalar function with analytic derivatives through third order.
pub trait ScalarFn<T: Real> {
    fn f(&self, x: T) -> T;
    fn df(&self, x: T) -> T;
    fn d2f(&self, x: T) -> T;
    fn d3f(&self, x: T) -> T;

    /// Whether `x` lies in the function's domain (value level).
    fn domain_contains(&self, x: T) -> bool {
        let _ = x;
        true
    }

    /// First divided difference `f[a,b]`. `scale` calibrates the coincidence
    /// threshold; implementations may override with a cancellation-free form.
    fn dd1(&self, a: T, b: T, scale: T) -> T {
        if (a - b).abs() < coincidence_tol::<T>() * scale {
            self.df((a + b) * T::of(0.5))
        } else {
            (self.f(a) - self.f(b)) / (a - b)
        }
    }
}

/// `x^p` with real exponent.
#[derive(Clone, Copy, Debug)]
pub struct PowerFn<T> {
    pub p: T,
}

impl<T: Real> PowerFn<T> {
    pub fn new(p: T) -> Self {
        PowerFn { p }
    }

    fn is_integer_exponent(&self) -> bool {
        self.p == self.p.round() && self.p.abs() < T::of(64.0)
    }
}

impl<T: Real> ScalarFn<T> for PowerFn<T> {
    fn f(&self, x: T) -> T {
        x.powf(self.p)
    }

    fn df(&self, x: T) -> T {
        self.p * x.powf(self.p - T::one())
    }

    fn d2f(&self, x: T) -> T {
        self.p * (self.p - T::one()) * x.powf(self.p - T::of(2.0))
    }

    fn d3f(&self, x: T) -> T {
        self.p * (self.p - T::one()) * (self.p - T::of(2.0)) * x.powf(self.p - T::of(3.0))
    }

    fn domain_contains(&self, x: T) -> bool {
        if self.is_integer_exponent() {
            x != T::zero() || self.p >= T::zero()
        } else if self.p >= T::zero() {
            x >= T::zero()
        } else {
            x > T::zero()
        }
    }

    fn dd1(&self, a: T, b: T, scale: T) -> T {
        let diff = a - b;
        if diff.abs() < coincidence_tol::<T>() * scale {
            return self.df((a + b) * T::of(0.5));
        }
        // (a^p - b^p)/(a - b) = b^p expm1(p log1p((a-b)/b)) / (a - b),
        // stable when a/b is near 1.
        if b > T::zero() && a > T::zero() {
            let u = diff / b;
            if u.abs() < T::of(0.5) {
                return b.powf(self.p) * (self.p * u.ln_1p()).exp_m1() / diff;
            }
        }
        (self.f(a) - self.f(b)) / diff
    }
}

/// `x * p * x^(p-1) = p x^p`, the "x f'(x)" companion of a power.
#[derive(Clone, Copy, Debug)]
pub struct ScaledPowerFn<T> {
    pub coeff: T,
    pub p: T,
}

impl<T: Real> ScalarFn<T> for ScaledPowerFn<T> {
    fn f(&self, x: T) -> T {
        self.coeff * x.powf(self.p)
    }
    fn df(&self, x: T) -> T {
        self.coeff * self.p * x.powf(self.p - T::one())
    }
    fn d2f(&self, x: T) -> T {
        self.coeff * self.p * (self.p - T::one()) * x.powf(self.p - T::of(2.0))
    }
    fn d3f(&self, x: T) -> T {
        self.coeff * self.p * (self.p - T::one()) * (self.p - T::of(2.0)) * x.powf(self.p - T::of(3.0))
    }
    fn domain_contains(&self, x: T) -> bool {
        PowerFn::new(self.p).domain_contains(x)
    }
    fn dd1(&self, a: T, b: T, scale: T) -> T {
        self.coeff * PowerFn::new(self.p).dd1(a, b, scale)
    }
}

/// Natural logarithm.
#[derive(Clone, Copy, Debug)]
pub struct LnFn;

impl<T: Real> ScalarFn<T> for LnFn {
    fn f(&self, x: T) -> T {
        x.ln()
    }
    fn df(&self, x: T) -> T {
        x.recip()
    }
    fn d2f(&self, x: T) -> T {
        -(x * x).recip()
    }
    fn d3f(&self, x: T) -> T {
        T::of(2.0) / (x * x * x)
    }
    fn domain_contains(&self, x: T) -> bool {
        x > T::zero()
    }
    fn dd1(&self, a: T, b: T, scale: T) -> T {
        let diff = a - b;
        if diff.abs() < coincidence_tol::<T>() * scale {
            return ((a + b) * T::of(0.5)).recip();
        }
        if b > T::zero() {
            let u = diff / b;
            if u.abs() < T::of(0.5) {
                return u.ln_1p() / diff;
            }
        }
        (a.ln() - b.ln()) / diff
    }
}

fn scale_of<T: Real>(lams: &[T]) -> T {
    let mut s = T::one();
    for &x in lams {
        s = s.max(x.abs());
    }
    s
}

/// Second divided difference, symmetric in its three arguments. Sorts the
/// nodes and divides by the widest gap.
pub fn dd2<T: Real, F: ScalarFn<T> + ?Sized>(f: &F, a: T, b: T, c: T, scale: T) -> T {
    let mut v = [a, b, c];
    v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let [x0, x1, x2] = v;
    if (x2 - x0).abs() < coincidence_tol::<T>() * scale {
        return f.d2f(x1) * T::of(0.5);
    }
    (f.dd1(x2, x1, scale) - f.dd1(x1, x0, scale)) / (x2 - x0)
}

/// Third divided difference, symmetric in its four arguments.
pub fn dd3<T: Real, F: ScalarFn<T> + ?Sized>(f: &F, a: T, b: T, c: T, d: T, scale: T) -> T {
    let mut v = [a, b, c, d];
    v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let [x0, x1, x2, x3] = v;
    if (x3 - x0).abs() < coincidence_tol::<T>() * scale {
        return f.d3f((x1 + x2) * T::of(0.5)) / T::of(6.0);
    }
    (dd2(f, x1, x2, x3, scale) - dd2(f, x0, x1, x2, scale)) / (x3 - x0)
}

/// Dense table of first divided differences `f[λ_i, λ_j]`.
#[derive(Clone, Debug)]
pub struct Dd1Table<T> {
    pub n: usize,
    pub vals: Vec<T>,
}

impl<T: Real> Dd1Table<T> {
    pub fn build<F: ScalarFn<T> + ?Sized>(f: &F, lams: &[T]) -> Self {
        let n = lams.len();
        let scale = scale_of(lams);
        let mut vals = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = f.dd1(lams[i], lams[j], scale);
                vals[i * n + j] = v;
                vals[j * n + i] = v;
            }
        }
        Dd1Table { n, vals }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.vals[i * self.n + j]
    }
}

/// Dense table of second divided differences `f[λ_i, λ_j, λ_k]`.
#[derive(Clone, Debug)]
pub struct Dd2Table<T> {
    pub n: usize,
    pub vals: Vec<T>,
}

impl<T: Real> Dd2Table<T> {
    pub fn build<F: ScalarFn<T> + ?Sized>(f: &F, lams: &[T]) -> Self {
        let n = lams.len();
        let scale = scale_of(lams);
        let mut vals = vec![T::zero(); n * n * n];
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let v = dd2(f, lams[i], lams[j], lams[k], scale);
                    // All six permutations share the value.
                    for (a, b, c) in [
                        (i, j, k),
                        (i, k, j),
                        (j, i, k),
                        (j, k, i),
                        (k, i, j),
                        (k, j, i),
                    ] {
                        vals[(a * n + b) * n + c] = v;
                    }
                }
            }
        }
        Dd2Table { n, vals }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> T {
        self.vals[(i * self.n + j) * self.n + k]
    }
}

/// Divided-difference tables as a standalone operation: order 1 and 2 return
/// dense tables; order 3 is exposed through [`dd3`] to avoid an n⁴ table.
pub enum DdTable<T> {
    First(Dd1Table<T>),
    Second(Dd2Table<T>),
}

/// Build the requested divided-difference table over the nodes `lams`.
pub fn divided_differences<T: Real, F: ScalarFn<T> + ?Sized>(
    f: &F,
    lams: &[T],
    order: u8,
) -> Result<DdTable<T>, super::MatError> {
    for &x in lams {
        if !f.domain_contains(x) {
            return Err(super::MatError::DomainViolation { eigenvalue: x.to_f64().unwrap_or(f64::NAN) });
        }
    }
    match order {
        1 => Ok(DdTable::First(Dd1Table::build(f, lams))),
        2 => Ok(DdTable::Second(Dd2Table::build(f, lams))),
        o => Err(super::MatError::BadOrder(o)),
    }
}
