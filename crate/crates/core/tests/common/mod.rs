//! Shared test oracles, kept independent of the solver paths they check.

use staircase::distribution::{invariance_set, Dataset, StaircaseParams};
use staircase::spline::{PenaltyMatrix, SplineBasis};

/// The raw min-max objective Σᵢ max_{x̃∈B(xᵢ)} (Φ(x̃)ᵀθ − yᵢ)² + λθᵀΩθ,
/// evaluated directly from precomputed feature rows.
pub struct RobustObjective {
    /// Per sample: the feature rows of its invariance set and the target.
    rows: Vec<(Vec<(usize, [f64; 4])>, f64)>,
    omega: Vec<Vec<f64>>,
    lambda: f64,
    dim: usize,
}

impl RobustObjective {
    pub fn new(
        basis: &SplineBasis,
        penalty: &PenaltyMatrix,
        data: &Dataset,
        params: &StaircaseParams,
        lambda: f64,
    ) -> Self {
        let dim = basis.dim();
        let mut rows = Vec::with_capacity(data.len());
        for (&x, &y) in data.xs.iter().zip(&data.ys) {
            let feats: Vec<(usize, [f64; 4])> = invariance_set(params, x)
                .iter()
                .map(|&p| basis_eval(basis, p))
                .collect();
            rows.push((feats, y));
        }
        let omega = (0..dim)
            .map(|i| (0..dim).map(|j| penalty.omega()[(i, j)]).collect())
            .collect();
        RobustObjective {
            rows,
            omega,
            lambda,
            dim,
        }
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        let mut total = 0.0;
        for (feats, y) in &self.rows {
            let mut worst = 0.0f64;
            for &(off, vals) in feats {
                let r = dot4(&vals, theta, off) - y;
                worst = worst.max(r * r);
            }
            total += worst;
        }
        total + self.lambda * self.quad(theta)
    }

    fn quad(&self, theta: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            let mut row = 0.0;
            for j in 0..self.dim {
                row += self.omega[i][j] * theta[j];
            }
            acc += theta[i] * row;
        }
        acc
    }

    /// A subgradient: the argmax atom of each sample contributes its
    /// gradient, plus the penalty term.
    pub fn subgradient(&self, theta: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for i in 0..self.dim {
            let mut row = 0.0;
            for j in 0..self.dim {
                row += self.omega[i][j] * theta[j];
            }
            g[i] = 2.0 * self.lambda * row;
        }
        for (feats, y) in &self.rows {
            let mut worst = f64::NEG_INFINITY;
            let mut pick = 0usize;
            for (k, &(off, vals)) in feats.iter().enumerate() {
                let r = dot4(&vals, theta, off) - y;
                if r * r > worst {
                    worst = r * r;
                    pick = k;
                }
            }
            let (off, vals) = feats[pick];
            let r = dot4(&vals, theta, off) - y;
            for k in 0..4 {
                g[off + k] += 2.0 * r * vals[k];
            }
        }
        g
    }
}

fn basis_eval(basis: &SplineBasis, x: f64) -> (usize, [f64; 4]) {
    let phi = staircase::spline::eval_features(basis, x).expect("point on domain");
    let off = phi
        .iter()
        .position(|&v| v != 0.0)
        .unwrap_or(0)
        .min(phi.len() - 4);
    let mut vals = [0.0; 4];
    vals.copy_from_slice(&phi[off..off + 4]);
    (off, vals)
}

fn dot4(vals: &[f64; 4], theta: &[f64], off: usize) -> f64 {
    vals[0] * theta[off]
        + vals[1] * theta[off + 1]
        + vals[2] * theta[off + 2]
        + vals[3] * theta[off + 3]
}

/// Projected-subgradient descent on the raw min-max objective, run in
/// annealed restart cycles: normalized steps c/√t restarted from the best
/// iterate with geometrically shrinking c. Returns the best objective seen.
/// Only objective values and subgradients are consumed, so this stays an
/// independent check of the QP route.
pub fn subgradient_best_objective(
    objective: &RobustObjective,
    start: &[f64],
    iterations: usize,
) -> f64 {
    let cycles = 16usize;
    let len = (iterations / cycles).max(1);
    let mut best_theta = start.to_vec();
    let mut best = objective.value(&best_theta);
    for cycle in 0..cycles {
        let c = 0.4f64.powi(cycle as i32);
        let mut theta = best_theta.clone();
        for t in 0..len {
            let g = objective.subgradient(&theta);
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-14 {
                break;
            }
            let step = c / ((t + 1) as f64).sqrt();
            for (p, gi) in theta.iter_mut().zip(&g) {
                *p -= step * gi / norm;
            }
            let value = objective.value(&theta);
            if value < best {
                best = value;
                best_theta.copy_from_slice(&theta);
            }
        }
    }
    best
}
