//! KKT certificate checks for candidate primal/dual pairs.

use crate::{inf_norm, QpSolution, QuadProgram};

/// Residuals of the four KKT conditions at a primal/dual pair, each paired
/// with the scale used for its relative test.
#[derive(Debug, Clone)]
pub struct KktReport {
    pub stationarity: f64,
    pub stationarity_scale: f64,
    pub primal_feasibility: f64,
    pub primal_scale: f64,
    pub dual_feasibility: f64,
    pub complementarity: f64,
    pub complementarity_scale: f64,
    pub ok: bool,
}

/// Check stationarity, primal feasibility, dual feasibility and complementary
/// slackness of `solution` at tolerance `tol`. Each residual is compared
/// against `tol` times its scale (never below `tol` itself).
pub fn check_kkt(program: &QuadProgram, solution: &QpSolution, tol: f64) -> KktReport {
    let z = &solution.z;
    let y = &solution.duals;
    assert_eq!(z.len(), program.num_vars(), "primal dimension mismatch");
    assert_eq!(y.len(), program.num_constraints(), "dual dimension mismatch");

    let pz = program.p().mul_vec(z);
    let aty = program.a().mul_vec_t(y);
    let az = program.a().mul_vec(z);

    let mut stat = vec![0.0; z.len()];
    for i in 0..z.len() {
        stat[i] = pz[i] + program.q()[i] + aty[i];
    }
    let stationarity = inf_norm(&stat);
    let stationarity_scale = inf_norm(&pz)
        .max(inf_norm(program.q()))
        .max(inf_norm(&aty))
        .max(1.0);

    let mut primal = 0.0f64;
    let mut dual = 0.0f64;
    let mut comp = 0.0f64;
    for i in 0..y.len() {
        let slack = az[i] - program.b()[i];
        primal = primal.max(slack);
        dual = dual.max(-y[i]);
        comp = comp.max((y[i] * slack).abs());
    }
    let primal_scale = inf_norm(&az).max(inf_norm(program.b())).max(1.0);
    let complementarity_scale = inf_norm(y)
        .max({
            let mut s = 0.0f64;
            for i in 0..y.len() {
                s = s.max((az[i] - program.b()[i]).abs());
            }
            s
        })
        .max(1.0);

    let ok = stationarity <= tol * stationarity_scale
        && primal <= tol * primal_scale
        && dual <= tol
        && comp <= tol * complementarity_scale;

    KktReport {
        stationarity,
        stationarity_scale,
        primal_feasibility: primal.max(0.0),
        primal_scale,
        dual_feasibility: dual.max(0.0),
        complementarity: comp,
        complementarity_scale,
        ok,
    }
}

/// Objective gap |f(z) − f(reference)| / max(1, |f(reference)|), a helper for
/// cross-checking solutions against an oracle.
pub fn relative_objective_gap(program: &QuadProgram, z: &[f64], reference: &[f64]) -> f64 {
    let f = program.objective(z);
    let f_ref = program.objective(reference);
    (f - f_ref).abs() / f_ref.abs().max(1.0)
}
