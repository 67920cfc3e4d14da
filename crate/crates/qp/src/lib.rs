//! Convex quadratic programming by operator splitting.
//!
//! Solves programs of the form
//!
//! ```text
//!     minimize    1/2 zᵀ P z + qᵀ z
//!     subject to  A z ≤ b
//! ```
//!
//! with `P` symmetric positive semidefinite. The solver runs an over-relaxed
//! ADMM iteration on a regularized reduced system, factored once per penalty
//! value, and attempts an active-set polish step to drive the residuals to
//! machine precision. Matrices are sparse throughout, so problems with many
//! constraints but structured Hessians stay cheap.

mod admm;
mod kkt;
mod ldl;
mod sparse;

pub use kkt::{check_kkt, relative_objective_gap, KktReport};
pub use sparse::SparseMatrix;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("objective matrix is not symmetric (max violation {0:.3e})")]
    NotSymmetric(f64),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("factorization failed: {0}")]
    Factorization(String),
}

/// A convex quadratic program `min ½zᵀPz + qᵀz  s.t.  Az ≤ b`.
#[derive(Debug, Clone)]
pub struct QuadProgram {
    p: SparseMatrix,
    q: Vec<f64>,
    a: SparseMatrix,
    b: Vec<f64>,
}

impl QuadProgram {
    /// Symmetry tolerance for the objective Hessian.
    pub const SYMMETRY_TOL: f64 = 1e-10;

    pub fn new(
        p: SparseMatrix,
        q: Vec<f64>,
        a: SparseMatrix,
        b: Vec<f64>,
    ) -> Result<Self, SolverError> {
        let n = q.len();
        if p.nrows() != n || p.ncols() != n {
            return Err(SolverError::DimensionMismatch(format!(
                "P is {}x{} but q has length {n}",
                p.nrows(),
                p.ncols()
            )));
        }
        if a.ncols() != n {
            return Err(SolverError::DimensionMismatch(format!(
                "A has {} columns but the program has {n} variables",
                a.ncols()
            )));
        }
        if a.nrows() != b.len() {
            return Err(SolverError::DimensionMismatch(format!(
                "A has {} rows but b has length {}",
                a.nrows(),
                b.len()
            )));
        }
        let viol = p.max_symmetry_violation();
        if viol > Self::SYMMETRY_TOL {
            return Err(SolverError::NotSymmetric(viol));
        }
        Ok(QuadProgram { p, q, a, b })
    }

    /// Unconstrained program (`A` empty).
    pub fn unconstrained(p: SparseMatrix, q: Vec<f64>) -> Result<Self, SolverError> {
        let n = q.len();
        Self::new(p, q, SparseMatrix::zeros(0, n), Vec::new())
    }

    pub fn num_vars(&self) -> usize {
        self.q.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn p(&self) -> &SparseMatrix {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Objective value ½zᵀPz + qᵀz.
    pub fn objective(&self, z: &[f64]) -> f64 {
        let pz = self.p.mul_vec(z);
         0.5 * dot(&pz, z) + dot(&self.q, z)
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Initial ADMM penalty; adapted during the run.
    pub rho: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 200_000,
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            rho: 0.1,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<(), SolverError> {
        if self.abs_tol <= 0.0 || self.rel_tol <= 0.0 {
            return Err(SolverError::InvalidConfig(
                "tolerances must be positive".to_string(),
            ));
        }
        if self.rho <= 0.0 {
            return Err(SolverError::InvalidConfig("rho must be positive".to_string()));
        }
        if self.max_iters == 0 {
            return Err(SolverError::InvalidConfig(
                "max_iters must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// Solver output. `converged == false` means the iteration budget ran out;
/// the best iterate is still returned so the caller can decide.
#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub z: Vec<f64>,
    pub duals: Vec<f64>,
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solve the program. See [`QpSolution`] for the convergence contract:
/// a converged solution satisfies `max(Az − b, 0)∞ ≤ abs_tol` and
/// `‖Pz + q + Aᵀy‖∞ ≤ abs_tol + rel_tol · scale`.
pub fn solve_qp(program: &QuadProgram, config: &SolverConfig) -> Result<QpSolution, SolverError> {
    config.validate()?;
    admm::solve(program, config)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
