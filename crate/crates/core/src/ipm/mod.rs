//! Primal-dual interior-point solver for conic programs over products of
//! cones defined only through their barrier oracles.

pub mod cone;
pub mod kkt;
pub mod program;
mod solver;

pub use cone::BarrierOracle;
pub use program::{AffineExpr, ConeSet, ConicProgram, ProgramBuilder, VarBlock};
pub use solver::{solve, solve_with_log};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    IterationLimit,
    NumericalFailure,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::PrimalInfeasible => "primal_infeasible",
            SolveStatus::DualInfeasible => "dual_infeasible",
            SolveStatus::IterationLimit => "iteration_limit",
            SolveStatus::NumericalFailure => "numerical_failure",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions<T: Real> {
    pub gap_tol: T,
    pub feas_tol: T,
    pub max_iters: usize,
    /// Static regularization of the quasi-definite KKT matrix.
    pub reg: T,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions { gap_tol: T::of(1e-8), feas_tol: T::of(1e-9), max_iters: 400, reg: T::of(1e-10) }
    }
}

/// One line of the iteration log stream.
#[derive(Debug, Clone)]
pub struct IterInfo {
    pub iter: usize,
    pub mu: f64,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub gap: f64,
    pub p_res: f64,
    pub d_res: f64,
}

impl std::fmt::Display for IterInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "iter {:3}  mu {:9.3e}  gap {:9.3e}  pres {:9.3e}  dres {:9.3e}  pobj {:+.9e}",
            self.iter, self.mu, self.gap, self.p_res, self.d_res, self.primal_obj
        )
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult<T: Real> {
    pub status: SolveStatus,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub s: Vec<T>,
    pub objective: T,
    pub gap: T,
    pub iterations: usize,
    pub wall_time_s: f64,
}

impl<T: Real> SolveResult<T> {
    pub fn is_optimal(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal)
    }
}
