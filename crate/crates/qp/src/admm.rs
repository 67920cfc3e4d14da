//! Over-relaxed ADMM on the reduced system, plus active-set polish.
//!
//! Each iteration solves `(P + σI + ρAᵀA) x̃ = σx − q + Aᵀ(ρz − y)` with a
//! factorization reused across iterations, projects onto `z ≤ b`, and updates
//! the duals. Data is Ruiz-equilibrated up front; all termination checks run
//! on the original, unscaled problem. Once the iterate is close, the active
//! set is read off the duals and a regularized KKT solve with iterative
//! refinement produces a high-accuracy solution.

use crate::ldl::PermutedLdl;
use crate::sparse::SparseMatrix;
use crate::{inf_norm, QpSolution, QuadProgram, SolverConfig, SolverError};

const SIGMA: f64 = 1e-6;
const ALPHA: f64 = 1.6;
const CHECK_INTERVAL: usize = 25;
const RHO_ADAPT_INTERVAL: usize = 100;
const RHO_MIN: f64 = 1e-6;
const RHO_MAX: f64 = 1e6;
const POLISH_DELTA: f64 = 1e-9;
const POLISH_COOLDOWN: usize = 10;
const RUIZ_ITERS: usize = 10;
const MIN_SCALING: f64 = 1e-4;
const MAX_SCALING: f64 = 1e4;

struct Scaled {
    p: SparseMatrix,
    q: Vec<f64>,
    a: SparseMatrix,
    b: Vec<f64>,
    d: Vec<f64>,
    e: Vec<f64>,
    c: f64,
}

fn limit_scaling(v: f64) -> f64 {
    if v < MIN_SCALING {
        1.0
    } else {
        v.min(MAX_SCALING)
    }
}

fn ruiz_equilibrate(prog: &QuadProgram) -> Scaled {
    let n = prog.num_vars();
    let m = prog.num_constraints();
    let mut p = prog.p().clone();
    let mut q = prog.q().to_vec();
    let mut a = prog.a().clone();
    let mut d_total = vec![1.0; n];
    let mut e_total = vec![1.0; m];
    let mut c_total = 1.0;

    for _ in 0..RUIZ_ITERS {
        let p_cols = p.col_inf_norms();
        let a_cols = a.col_inf_norms();
        let a_rows = a.row_inf_norms();
        let d: Vec<f64> = (0..n)
            .map(|j| 1.0 / limit_scaling(p_cols[j].max(a_cols[j])).sqrt())
            .collect();
        let e: Vec<f64> = (0..m)
            .map(|i| 1.0 / limit_scaling(a_rows[i]).sqrt())
            .collect();
        p.scale(&d, &d);
        a.scale(&e, &d);
        for j in 0..n {
            q[j] *= d[j];
            d_total[j] *= d[j];
        }
        for i in 0..m {
            e_total[i] *= e[i];
        }

        let p_cols = p.col_inf_norms();
        let mean_p = if n > 0 {
            p_cols.iter().sum::<f64>() / n as f64
        } else {
            0.0
        };
        let gamma = 1.0 / limit_scaling(mean_p.max(inf_norm(&q)));
        p.scale_values(gamma);
        for qj in &mut q {
            *qj *= gamma;
        }
        c_total *= gamma;
    }

    let b = prog
        .b()
        .iter()
        .zip(&e_total)
        .map(|(&bi, &ei)| bi * ei)
        .collect();
    Scaled {
        p,
        q,
        a,
        b,
        d: d_total,
        e: e_total,
        c: c_total,
    }
}

/// Upper-triangle triplets of AᵀA, built row-by-row from Aᵀ (whose columns
/// are the rows of A).
fn upper_ata(at: &SparseMatrix) -> Vec<(usize, usize, f64)> {
    let mut trips = Vec::new();
    for r in 0..at.ncols() {
        let entries: Vec<(usize, f64)> = at.col_iter(r).collect();
        for (k1, &(j1, v1)) in entries.iter().enumerate() {
            for &(j2, v2) in &entries[k1..] {
                trips.push((j1.min(j2), j1.max(j2), v1 * v2));
            }
        }
    }
    trips
}

struct Residuals {
    viol: f64,
    stat: f64,
    stat_scale: f64,
}

fn residuals(prog: &QuadProgram, x: &[f64], y: &[f64]) -> Residuals {
    let px = prog.p().mul_vec(x);
    let aty = prog.a().mul_vec_t(y);
    let ax = prog.a().mul_vec(x);
    let mut stat = 0.0f64;
    for i in 0..x.len() {
        stat = stat.max((px[i] + prog.q()[i] + aty[i]).abs());
    }
    let mut viol = 0.0f64;
    for i in 0..y.len() {
        viol = viol.max(ax[i] - prog.b()[i]);
    }
    Residuals {
        viol: viol.max(0.0),
        stat,
        stat_scale: inf_norm(&px).max(inf_norm(prog.q())).max(inf_norm(&aty)),
    }
}

fn meets_tolerances(res: &Residuals, cfg: &SolverConfig) -> bool {
    res.viol <= cfg.abs_tol && res.stat <= cfg.abs_tol + cfg.rel_tol * res.stat_scale
}

pub(crate) fn solve(prog: &QuadProgram, cfg: &SolverConfig) -> Result<QpSolution, SolverError> {
    let n = prog.num_vars();
    let m = prog.num_constraints();

    let scaled = ruiz_equilibrate(prog);
    let at_scaled = scaled.a.transpose();
    let at_orig = prog.a().transpose();

    let p_upper: Vec<(usize, usize, f64)> = scaled
        .p
        .triplets()
        .filter(|&(i, j, _)| i <= j)
        .collect();
    let ata = upper_ata(&at_scaled);

    let factor = |rho: f64| -> Result<PermutedLdl, SolverError> {
        let mut trips = Vec::with_capacity(p_upper.len() + n + ata.len());
        trips.extend_from_slice(&p_upper);
        for i in 0..n {
            trips.push((i, i, SIGMA));
        }
        for &(i, j, v) in &ata {
            trips.push((i, j, rho * v));
        }
        PermutedLdl::from_upper_triplets(n, trips)
    };

    let mut rho = cfg.rho;
    let mut ldl = factor(rho)?;

    let mut x = vec![0.0; n];
    let mut z: Vec<f64> = scaled.b.iter().map(|&bi| bi.min(0.0)).collect();
    let mut y = vec![0.0; m];

    let b_norm = inf_norm(prog.b()).max(1.0);
    let mut best: Option<(f64, QpSolution)> = None;
    let mut cooldown = 0usize;

    for iter in 1..=cfg.max_iters {
        // x̃ from the reduced system, z̃ = A x̃
        let mut w = vec![0.0; m];
        for i in 0..m {
            w[i] = rho * z[i] - y[i];
        }
        let atw = scaled.a.mul_vec_t(&w);
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            rhs[i] = SIGMA * x[i] - scaled.q[i] + atw[i];
        }
        let x_tilde = ldl.solve(&rhs);
        let z_tilde = scaled.a.mul_vec(&x_tilde);

        for i in 0..n {
            x[i] = ALPHA * x_tilde[i] + (1.0 - ALPHA) * x[i];
        }
        for i in 0..m {
            let v = ALPHA * z_tilde[i] + (1.0 - ALPHA) * z[i] + y[i] / rho;
            let z_new = v.min(scaled.b[i]);
            y[i] = rho * (v - z_new);
            z[i] = z_new;
        }

        if iter % CHECK_INTERVAL != 0 && iter != cfg.max_iters {
            continue;
        }

        // Unscaled iterate and residuals.
        let xu: Vec<f64> = (0..n).map(|i| scaled.d[i] * x[i]).collect();
        let yu: Vec<f64> = (0..m).map(|i| scaled.e[i] * y[i] / scaled.c).collect();
        let res = residuals(prog, &xu, &yu);

        if meets_tolerances(&res, cfg) {
            // Polish to tighten complementarity; keep the raw iterate if the
            // polish step does not certify.
            if let Some(mut sol) = polish(prog, &at_orig, &yu, cfg) {
                sol.iterations = iter;
                return Ok(sol);
            }
            return Ok(QpSolution {
                objective: prog.objective(&xu),
                z: xu,
                duals: yu,
                primal_residual: res.viol,
                dual_residual: res.stat,
                iterations: iter,
                converged: true,
            });
        }

        let close = res.viol <= 1e-4 * b_norm && res.stat <= 1e-4 * res.stat_scale.max(1.0);
        if close && cooldown == 0 {
            if let Some(mut sol) = polish(prog, &at_orig, &yu, cfg) {
                sol.iterations = iter;
                return Ok(sol);
            }
            cooldown = POLISH_COOLDOWN;
        }
        cooldown = cooldown.saturating_sub(1);

        let score = (res.viol / b_norm).max(res.stat / res.stat_scale.max(1.0));
        if best.as_ref().map_or(true, |(s, _)| score < *s) {
            best = Some((
                score,
                QpSolution {
                    objective: prog.objective(&xu),
                    z: xu,
                    duals: yu,
                    primal_residual: res.viol,
                    dual_residual: res.stat,
                    iterations: iter,
                    converged: false,
                },
            ));
        }

        if iter % RHO_ADAPT_INTERVAL == 0 && m > 0 {
            let ax_s = scaled.a.mul_vec(&x);
            let mut r_prim = 0.0f64;
            let mut prim_scale = 1e-12f64;
            for i in 0..m {
                r_prim = r_prim.max((ax_s[i] - z[i]).abs());
                prim_scale = prim_scale.max(ax_s[i].abs()).max(z[i].abs());
            }
            let px_s = scaled.p.mul_vec(&x);
            let aty_s = scaled.a.mul_vec_t(&y);
            let mut r_dual = 0.0f64;
            let mut dual_scale = 1e-12f64;
            for i in 0..n {
                r_dual = r_dual.max((px_s[i] + scaled.q[i] + aty_s[i]).abs());
                dual_scale = dual_scale
                    .max(px_s[i].abs())
                    .max(scaled.q[i].abs())
                    .max(aty_s[i].abs());
            }
            let ratio = (r_prim / prim_scale) / (r_dual / dual_scale).max(1e-300);
            let rho_new = (rho * ratio.sqrt()).clamp(RHO_MIN, RHO_MAX);
            if rho_new > 5.0 * rho || rho_new < rho / 5.0 {
                rho = rho_new;
                ldl = factor(rho)?;
            }
        }
    }

    Ok(best.expect("at least one residual check happens").1)
}

/// Solve the equality-constrained QP on the active set read off the duals.
/// Returns a solution only when it certifies against the full program at the
/// configured tolerances.
fn polish(
    prog: &QuadProgram,
    at: &SparseMatrix,
    duals: &[f64],
    cfg: &SolverConfig,
) -> Option<QpSolution> {
    let n = prog.num_vars();
    let active: Vec<usize> = (0..duals.len()).filter(|&i| duals[i] > 0.0).collect();
    let na = active.len();
    let nk = n + na;

    let mut trips: Vec<(usize, usize, f64)> = prog
        .p()
        .triplets()
        .filter(|&(i, j, _)| i <= j)
        .collect();
    for i in 0..n {
        trips.push((i, i, POLISH_DELTA));
    }
    for (r, &row) in active.iter().enumerate() {
        for (col, v) in at.col_iter(row) {
            trips.push((col, n + r, v));
        }
        trips.push((n + r, n + r, -POLISH_DELTA));
    }

    let ldl = PermutedLdl::from_upper_triplets(nk, trips).ok()?;
    let mut rhs = vec![0.0; nk];
    for i in 0..n {
        rhs[i] = -prog.q()[i];
    }
    for (r, &row) in active.iter().enumerate() {
        rhs[n + r] = prog.b()[row];
    }

    let mut sol = ldl.solve(&rhs);
    for _ in 0..3 {
        // Residual against the unregularized KKT matrix.
        let x = &sol[..n];
        let nu = &sol[n..];
        let px = prog.p().mul_vec(x);
        let mut resid = vec![0.0; nk];
        for i in 0..n {
            resid[i] = rhs[i] - px[i];
        }
        for (r, &row) in active.iter().enumerate() {
            let mut ax_r = 0.0;
            for (col, v) in at.col_iter(row) {
                ax_r += v * x[col];
                resid[col] -= v * nu[r];
            }
            resid[n + r] = rhs[n + r] - ax_r;
        }
        if inf_norm(&resid) < 1e-14 * inf_norm(&rhs).max(1.0) {
            break;
        }
        let corr = ldl.solve(&resid);
        for i in 0..nk {
            sol[i] += corr[i];
        }
    }

    let z = sol[..n].to_vec();
    let nu = &sol[n..];
    let nu_scale = inf_norm(nu).max(1.0);
    if nu.iter().any(|&v| v < -1e-7 * nu_scale || !v.is_finite()) {
        return None;
    }
    let mut full_duals = vec![0.0; duals.len()];
    for (r, &row) in active.iter().enumerate() {
        full_duals[row] = nu[r].max(0.0);
    }

    let res = residuals(prog, &z, &full_duals);
    if !meets_tolerances(&res, cfg) {
        return None;
    }
    Some(QpSolution {
        objective: prog.objective(&z),
        z,
        duals: full_duals,
        primal_residual: res.viol,
        dual_residual: res.stat,
        iterations: 0,
        converged: true,
    })
}
