//! Risk metrics. Standard population quantities are computed exactly over
//! the finite support; the robust population MSE integrates the target noise
//! by Monte Carlo (exactly when σ = 0).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::distribution::{f_star, invariance_set, support, Dataset, StaircaseParams};
use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, FittedModel};
use crate::spline::{predict, SplineBasis};

/// One row of sweep output; also the CSV schema, in field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub estimator_kind: EstimatorKind,
    pub n: usize,
    pub lambda: f64,
    pub trial_seed: u64,
    pub test_mse: f64,
    pub train_mse: f64,
    pub gen_gap: f64,
    pub robust_train_mse: f64,
    pub robust_test_mse: f64,
    pub norm: f64,
}

/// Exact population MSE over the finite support:
/// Σ_atoms p(x)·(f̂(x) − f*(x))² + σ².
pub fn population_mse(
    model: &FittedModel,
    basis: &SplineBasis,
    params: &StaircaseParams,
) -> Result<f64> {
    let mut total = params.sigma * params.sigma;
    for atom in support(params) {
        let err = predict(basis, &model.theta, atom.x)? - f_star(params, atom.x);
        total += atom.prob * err * err;
    }
    Ok(total)
}

/// Worst-case prediction band of the model over one invariance set.
fn prediction_band(
    model: &FittedModel,
    basis: &SplineBasis,
    params: &StaircaseParams,
    x: f64,
) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for point in invariance_set(params, x) {
        let p = predict(basis, &model.theta, point)?;
        lo = lo.min(p);
        hi = hi.max(p);
    }
    Ok((lo, hi))
}

/// Population robust MSE
/// E_x E_v [ max_{x̃ ∈ B(x)} (f̂(x̃) − f*(x) − σv)² ],
/// with exact atom probabilities and Monte Carlo over the Gaussian noise v
/// (deterministic per seed). With σ = 0 the value is exact.
pub fn population_robust_mse(
    model: &FittedModel,
    basis: &SplineBasis,
    params: &StaircaseParams,
    mc_samples: usize,
    seed: u64,
) -> Result<f64> {
    if params.sigma == 0.0 {
        return population_robust_mse_noiseless(model, basis, params);
    }
    if mc_samples == 0 {
        return Err(Error::InvalidParams(
            "mc_samples must be at least 1".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..mc_samples)
        .map(|_| {
            let v: f64 = rng.sample(StandardNormal);
            v
        })
        .collect();

    let mut total = 0.0;
    for atom in support(params) {
        if atom.prob == 0.0 {
            continue;
        }
        let (lo, hi) = prediction_band(model, basis, params, atom.x)?;
        let target = f_star(params, atom.x);
        let mut acc = 0.0;
        for &v in &noise {
            let c = target + params.sigma * v;
            let worst = (hi - c).max(c - lo);
            acc += worst * worst;
        }
        total += atom.prob * acc / mc_samples as f64;
    }
    Ok(total)
}

/// Noise-free robust population error
/// E_x [ max_{x̃ ∈ B(x)} (f̂(x̃) − f*(x))² ], computed exactly.
pub fn population_robust_mse_noiseless(
    model: &FittedModel,
    basis: &SplineBasis,
    params: &StaircaseParams,
) -> Result<f64> {
    let mut total = 0.0;
    for atom in support(params) {
        if atom.prob == 0.0 {
            continue;
        }
        let (lo, hi) = prediction_band(model, basis, params, atom.x)?;
        let target = f_star(params, atom.x);
        let worst = (hi - target).abs().max((target - lo).abs());
        total += atom.prob * worst * worst;
    }
    Ok(total)
}

/// Mean squared prediction error on a dataset (no penalty term).
pub fn empirical_mse(model: &FittedModel, basis: &SplineBasis, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total = 0.0;
    for (&x, &y) in data.xs.iter().zip(&data.ys) {
        let r = predict(basis, &model.theta, x)? - y;
        total += r * r;
    }
    Ok(total / data.len() as f64)
}

/// Mean worst-case squared error over the invariance sets (no penalty term).
pub fn empirical_robust_mse(
    model: &FittedModel,
    basis: &SplineBasis,
    data: &Dataset,
    params: &StaircaseParams,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total = 0.0;
    for (&x, &y) in data.xs.iter().zip(&data.ys) {
        let (lo, hi) = prediction_band(model, basis, params, x)?;
        let worst = (hi - y).max(y - lo);
        total += worst * worst;
    }
    Ok(total / data.len() as f64)
}
