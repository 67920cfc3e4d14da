//! The training procedures over the spline hypothesis class: penalized least
//! squares in closed form, the adversarially trained (robust) estimator via
//! an epigraph QP, and the data-augmented estimator that replaces the inner
//! maximum with an average over the invariance set.

use nalgebra::{Cholesky, DVector};
use serde::{Deserialize, Serialize};

use crate::distribution::{invariance_set, Dataset, StaircaseParams};
use crate::error::{Error, Result};
use crate::hash::Fingerprint;
use crate::spline::{build_penalty, predict, PenaltyMatrix, SplineBasis};

pub use qp::{KktReport, QpSolution, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Standard,
    Robust,
    Augmented,
    Rst,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::Standard,
        EstimatorKind::Robust,
        EstimatorKind::Augmented,
        EstimatorKind::Rst,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Standard => "standard",
            EstimatorKind::Robust => "robust",
            EstimatorKind::Augmented => "augmented",
            EstimatorKind::Rst => "rst",
        }
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(EstimatorKind::Standard),
            "robust" => Ok(EstimatorKind::Robust),
            "augmented" => Ok(EstimatorKind::Augmented),
            "rst" => Ok(EstimatorKind::Rst),
            other => Err(Error::Config(format!("unknown estimator '{other}'"))),
        }
    }
}

/// A fitted spline model: coefficients, its regularization strength, and the
/// procedure that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub kind: EstimatorKind,
    #[serde(skip)]
    pub basis_fingerprint: u64,
}

impl FittedModel {
    pub fn fingerprint(&self) -> u64 {
        let mut fp = Fingerprint::new("fitted-model");
        fp.push_str(self.kind.as_str())
            .push_f64(self.lambda)
            .push_u64(self.basis_fingerprint)
            .push_f64s(&self.theta);
        fp.finish()
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParams(format!(
            "lambda must be a nonnegative finite number (got {lambda})"
        )));
    }
    Ok(())
}

/// Ridge solve (Φ(X)ᵀΦ(X) + λΩ) θ = Φ(X)ᵀ y. Errors when the normal matrix
/// is singular, which can only happen at λ = 0 or with degenerate data.
pub fn fit_standard(
    basis: &SplineBasis,
    penalty: &PenaltyMatrix,
    data: &Dataset,
    lambda: f64,
) -> Result<FittedModel> {
    check_lambda(lambda)?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let theta = weighted_ridge(basis, penalty, lambda, data.xs.iter().copied().map(|x| (x, 1.0)), &data.ys)?;
    Ok(FittedModel {
        theta,
        lambda,
        kind: EstimatorKind::Standard,
        basis_fingerprint: basis.fingerprint(),
    })
}

/// Normal-equations solve shared by the standard and augmented fits. `rows`
/// yields (x, weight) pairs, one per entry of `targets`.
fn weighted_ridge(
    basis: &SplineBasis,
    penalty: &PenaltyMatrix,
    lambda: f64,
    rows: impl Iterator<Item = (f64, f64)>,
    targets: &[f64],
) -> Result<Vec<f64>> {
    let d = basis.dim();
    if penalty.dim() != d {
        return Err(Error::DimensionMismatch(
            "penalty matrix does not match basis".to_string(),
        ));
    }
    let mut normal = penalty.omega() * lambda;
    let mut rhs = DVector::<f64>::zeros(d);
    let mut count = 0usize;
    for (k, (x, w)) in rows.enumerate() {
        let (off, vals) = basis.eval_local(x)?;
        let y = targets[k];
        for i in 0..4 {
            rhs[off + i] += w * vals[i] * y;
            for j in 0..4 {
                normal[(off + i, off + j)] += w * vals[i] * vals[j];
            }
        }
        count += 1;
    }
    debug_assert_eq!(count, targets.len());
    let chol = Cholesky::new(normal).ok_or(Error::RankDeficient)?;
    let theta = chol.solve(&rhs);
    Ok(theta.iter().copied().collect())
}

/// Everything the robust fit knows about its own optimization, for callers
/// that want to audit it.
#[derive(Debug, Clone)]
pub struct RobustFitReport {
    pub solution: QpSolution,
    pub kkt: KktReport,
    pub constraints: usize,
}

/// Adversarially trained estimator: minimize
/// Σᵢ max_{x̃ ∈ B(xᵢ)} (Φ(x̃)ᵀθ − yᵢ)² + λ θᵀΩθ
/// through the epigraph QP over (θ, s): minimize Σ sᵢ² + λθᵀΩθ subject to
/// sᵢ ≥ ±(Φ(x̃)ᵀθ − yᵢ) for every x̃ ∈ B(xᵢ).
pub fn fit_robust(
    basis: &SplineBasis,
    penalty: &PenaltyMatrix,
    data: &Dataset,
    params: &StaircaseParams,
    lambda: f64,
    config: &SolverConfig,
) -> Result<FittedModel> {
    fit_robust_with(basis, penalty, data, lambda, config, |x| {
        invariance_set(params, x).to_vec()
    })
    .map(|(model, _)| model)
}

/// Robust fit returning the solver diagnostics alongside the model.
pub fn fit_robust_diagnostics(
    basis: &SplineBasis,
    penalty: &PenaltyMatrix,
    data: &Dataset,
    params: &StaircaseParams,
    lambda: f64,
    config: &SolverConfig,
) -> Result<(FittedModel, RobustFitReport)> {
    fit_robust_with(basis, penalty, data, lambda, config, |x| {
        invariance_set(params, x).to_vec()
    })
}

/// Robust fit with an injected invariance-set function. The degenerate hook
/// B(x) = {x} makes the fit coincide with the standard estimator.
pub fn fit_robust_with(
    basis: &SplineBasis,
    penalty: &PenaltyMatrix,
    data: &Dataset,
    lambda: f64,
    config: &SolverConfig,
    bset: impl Fn(f64) -> Vec<f64>,
) -> Result<(FittedModel, RobustFitReport)> {
    check_lambda(lambda)?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let d = basis.dim();
    if penalty.dim() != d {
        return Err(Error::DimensionMismatch(
            "penalty matrix does not match basis".to_string(),
        ));
    }
    let n = data.len();
    let nv = d + n;

    let mut p_trips: Vec<(usize, usize, f64)> = Vec::new();
    if lambda > 0.0 {
        let omega = penalty.omega();
        for i in 0..d {
            for j in 0..d {
                let v = omega[(i, j)];
                if v != 0.0 {
                    p_trips.push((i, j, 2.0 * lambda * v));
                }
            }
        }
    }
    for i in 0..n {
        p_trips.push((d + i, d + i, 2.0));
    }
    let p = qp::SparseMatrix::from_triplets(nv, nv, p_trips)?;

    let mut a_trips: Vec<(usize, usize, f64)> = Vec::new();
    let mut b = Vec::new();
    let mut row = 0usize;
    for (i, (&x, &y)) in data.xs.iter().zip(&data.ys).enumerate() {
        for point in bset(x) {
            let (off, vals) = basis.eval_local(point)?;
            for k in 0..4 {
                if vals[k] != 0.0 {
                    a_trips.push((row, off + k, vals[k]));
                    a_trips.push((row + 1, off + k, -vals[k]));
                }
            }
            a_trips.push((row, d + i, -1.0));
            a_trips.push((row + 1, d + i, -1.0));
            b.push(y);
            b.push(-y);
            row += 2;
        }
    }
    let a = qp::SparseMatrix::from_triplets(row, nv, a_trips)?;
    let constraints = row;

    let program = qp::QuadProgram::new(p, vec![0.0; nv], a, b)?;
    let solution = qp::solve_qp(&program, config)?;
    if !solution.converged {
        return Err(Error::SolverDidNotConverge {
            iterations: solution.iterations,
            primal_residual: solution.primal_residual,
            dual_residual: solution.dual_residual,
        });
    }
    let kkt = qp::check_kkt(&program, &solution, 10.0 * config.abs_tol);
    if !kkt.ok {
        return Err(Error::KktCertificate(format!(
            "stationarity {:.3e}, primal {:.3e}, dual {:.3e}, complementarity {:.3e}",
            kkt.stationarity, kkt.primal_feasibility, kkt.dual_feasibility, kkt.complementarity
        )));
    }

    let model = FittedModel {
        theta: solution.z[..d].to_vec(),
        lambda,
        kind: EstimatorKind::Robust,
        basis_fingerprint: basis.fingerprint(),
    };
    Ok((
        model,
        RobustFitReport {
            solution,
            kkt,
            constraints,
        },
    ))
}

/// Data-augmented estimator: minimize
/// Σᵢ (1/|B|) Σ_{x̃ ∈ B(xᵢ)} (Φ(x̃)ᵀθ − yᵢ)² + λ θᵀΩθ,
/// solved in closed form on the expanded design.
pub fn fit_augmented(
    basis: &SplineBasis,
    penalty: &PenaltyMatrix,
    data: &Dataset,
    params: &StaircaseParams,
    lambda: f64,
) -> Result<FittedModel> {
    fit_augmented_with(basis, penalty, data, lambda, |x| {
        invariance_set(params, x).to_vec()
    })
}

/// Augmented fit with an injected invariance-set function (degenerate hook
/// B(x) = {x} reduces to the standard fit exactly).
pub fn fit_augmented_with(
    basis: &SplineBasis,
    penalty: &PenaltyMatrix,
    data: &Dataset,
    lambda: f64,
    bset: impl Fn(f64) -> Vec<f64>,
) -> Result<FittedModel> {
    check_lambda(lambda)?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    for (&x, &y) in data.xs.iter().zip(&data.ys) {
        let points = bset(x);
        let w = 1.0 / points.len() as f64;
        for point in points {
            rows.push((point, w));
            targets.push(y);
        }
    }
    let theta = weighted_ridge(basis, penalty, lambda, rows.into_iter(), &targets)?;
    Ok(FittedModel {
        theta,
        lambda,
        kind: EstimatorKind::Augmented,
        basis_fingerprint: basis.fingerprint(),
    })
}

/// Σᵢ (Φ(xᵢ)ᵀθ − yᵢ)² + λ θᵀΩθ.
pub fn standard_objective(model: &FittedModel, basis: &SplineBasis, data: &Dataset) -> Result<f64> {
    let penalty = build_penalty(basis);
    let mut total = model.lambda * penalty.quadratic_form(&model.theta);
    for (&x, &y) in data.xs.iter().zip(&data.ys) {
        let r = predict(basis, &model.theta, x)? - y;
        total += r * r;
    }
    Ok(total)
}

/// Σᵢ max_{x̃ ∈ B(xᵢ)} (Φ(x̃)ᵀθ − yᵢ)² + λ θᵀΩθ.
pub fn robust_objective(
    model: &FittedModel,
    basis: &SplineBasis,
    data: &Dataset,
    params: &StaircaseParams,
) -> Result<f64> {
    let penalty = build_penalty(basis);
    let mut total = model.lambda * penalty.quadratic_form(&model.theta);
    for (&x, &y) in data.xs.iter().zip(&data.ys) {
        let mut worst = 0.0f64;
        for point in invariance_set(params, x) {
            let r = predict(basis, &model.theta, point)? - y;
            worst = worst.max(r * r);
        }
        total += worst;
    }
    Ok(total)
}

/// Σᵢ (1/3) Σ_{x̃ ∈ B(xᵢ)} (Φ(x̃)ᵀθ − yᵢ)² + λ θᵀΩθ.
pub fn augmented_objective(
    model: &FittedModel,
    basis: &SplineBasis,
    data: &Dataset,
    params: &StaircaseParams,
) -> Result<f64> {
    let penalty = build_penalty(basis);
    let mut total = model.lambda * penalty.quadratic_form(&model.theta);
    for (&x, &y) in data.xs.iter().zip(&data.ys) {
        let set = invariance_set(params, x);
        let mut mean = 0.0;
        for point in set {
            let r = predict(basis, &model.theta, point)? - y;
            mean += r * r;
        }
        total += mean / set.len() as f64;
    }
    Ok(total)
}

/// Squared spline seminorm ‖f‖² = θᵀΩθ.
pub fn model_norm(model: &FittedModel, penalty: &PenaltyMatrix) -> Result<f64> {
    if penalty.dim() != model.theta.len() {
        return Err(Error::DimensionMismatch(
            "penalty matrix does not match model".to_string(),
        ));
    }
    Ok(penalty.quadratic_form(&model.theta))
}

/// Gradient of the standard objective, used in tests as an optimality check:
/// 2Φᵀ(Φθ − y) + 2λΩθ.
pub fn standard_objective_gradient(
    model: &FittedModel,
    basis: &SplineBasis,
    penalty: &PenaltyMatrix,
    data: &Dataset,
) -> Result<Vec<f64>> {
    let d = basis.dim();
    let mut grad = vec![0.0; d];
    let omega = penalty.omega();
    for i in 0..d {
        let mut acc = 0.0;
        for j in 0..d {
            acc += omega[(i, j)] * model.theta[j];
        }
        grad[i] = 2.0 * model.lambda * acc;
    }
    for (&x, &y) in data.xs.iter().zip(&data.ys) {
        let (off, vals) = basis.eval_local(x)?;
        let r: f64 = (0..4).map(|k| vals[k] * model.theta[off + k]).sum::<f64>() - y;
        for k in 0..4 {
            grad[off + k] += 2.0 * vals[k] * r;
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::sample_dataset;
    use crate::spline::build_basis;

    fn setup(m: f64, s: usize) -> (StaircaseParams, SplineBasis, PenaltyMatrix) {
        let params = StaircaseParams::new(s, s.min(5), 0.1, 0.4, 0.2, m).unwrap();
        let basis = build_basis(params.s, params.epsilon).unwrap();
        let penalty = build_penalty(&basis);
        (params, basis, penalty)
    }

    #[test]
    fn zero_targets_give_zero_coefficients() {
        let (params, basis, penalty) = setup(0.0, 2);
        let mut data = sample_dataset(&params, 30, 1);
        data.ys.iter_mut().for_each(|y| *y = 0.0);
        let model = fit_standard(&basis, &penalty, &data, 0.5).unwrap();
        assert!(model.theta.iter().all(|&t| t.abs() < 1e-14));
    }

    #[test]
    fn standard_fit_is_stationary() {
        let (params, basis, penalty) = setup(1.0, 2);
        let data = sample_dataset(&params, 8, 3);
        let model = fit_standard(&basis, &penalty, &data, 0.01).unwrap();
        let grad = standard_objective_gradient(&model, &basis, &penalty, &data).unwrap();
        let inf: f64 = grad.iter().fold(0.0, |m, g| m.max(g.abs()));
        assert!(inf < 1e-8, "gradient norm {inf}");
    }

    #[test]
    fn huge_lambda_recovers_least_squares_line() {
        let (params, basis, penalty) = setup(1.0, 3);
        let data = sample_dataset(&params, 60, 5);
        let model = fit_standard(&basis, &penalty, &data, 1e8).unwrap();

        // closed-form simple linear regression
        let n = data.len() as f64;
        let mean_x = data.xs.iter().sum::<f64>() / n;
        let mean_y = data.ys.iter().sum::<f64>() / n;
        let sxy: f64 = data
            .xs
            .iter()
            .zip(&data.ys)
            .map(|(&x, &y)| (x - mean_x) * (y - mean_y))
            .sum();
        let sxx: f64 = data.xs.iter().map(|&x| (x - mean_x) * (x - mean_x)).sum();
        let slope = sxy / sxx;
        let intercept = mean_y - slope * mean_x;

        for &x in &data.xs {
            let fitted = predict(&basis, &model.theta, x).unwrap();
            let line = slope * x + intercept;
            assert!((fitted - line).abs() < 1e-3, "at x = {x}: {fitted} vs {line}");
        }
    }

    #[test]
    fn lambda_zero_with_rank_deficient_design_errors() {
        let (params, basis, penalty) = setup(1.0, 3);
        let data = sample_dataset(&params, 4, 7); // far fewer samples than dim
        assert!(matches!(
            fit_standard(&basis, &penalty, &data, 0.0),
            Err(Error::RankDeficient)
        ));
        assert!(fit_standard(&basis, &penalty, &data, -1.0).is_err());
    }

    #[test]
    fn singleton_invariance_set_reduces_robust_to_standard() {
        let (params, basis, penalty) = setup(1.0, 2);
        let data = sample_dataset(&params, 12, 11);
        let lambda = 0.05;
        let standard = fit_standard(&basis, &penalty, &data, lambda).unwrap();
        let cfg = SolverConfig::default();
        let (robust, _) =
            fit_robust_with(&basis, &penalty, &data, lambda, &cfg, |x| vec![x]).unwrap();
        for (a, b) in robust.theta.iter().zip(&standard.theta) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn singleton_invariance_set_reduces_augmented_to_standard() {
        let (params, basis, penalty) = setup(1.0, 2);
        let data = sample_dataset(&params, 12, 13);
        let lambda = 0.05;
        let standard = fit_standard(&basis, &penalty, &data, lambda).unwrap();
        let augmented =
            fit_augmented_with(&basis, &penalty, &data, lambda, |x| vec![x]).unwrap();
        for (a, b) in augmented.theta.iter().zip(&standard.theta) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn robust_fit_dominates_on_its_own_objective() {
        let (params, basis, penalty) = setup(1.0, 2);
        let data = sample_dataset(&params, 15, 17);
        let lambda = 0.02;
        let cfg = SolverConfig::default();
        let standard = fit_standard(&basis, &penalty, &data, lambda).unwrap();
        let robust = fit_robust(&basis, &penalty, &data, &params, lambda, &cfg).unwrap();
        let augmented = fit_augmented(&basis, &penalty, &data, &params, lambda).unwrap();

        let rob_of_rob = robust_objective(&robust, &basis, &data, &params).unwrap();
        let rob_of_std = robust_objective(&standard, &basis, &data, &params).unwrap();
        let rob_of_aug = robust_objective(&augmented, &basis, &data, &params).unwrap();
        assert!(rob_of_rob <= rob_of_std + 1e-8);
        assert!(rob_of_rob <= rob_of_aug + 1e-8);

        let std_of_std = standard_objective(&standard, &basis, &data).unwrap();
        let std_of_rob = standard_objective(&robust, &basis, &data).unwrap();
        let std_of_aug = standard_objective(&augmented, &basis, &data).unwrap();
        assert!(std_of_std <= std_of_rob + 1e-8);
        assert!(std_of_std <= std_of_aug + 1e-8);

        let aug_of_aug = augmented_objective(&augmented, &basis, &data, &params).unwrap();
        let aug_of_std = augmented_objective(&standard, &basis, &data, &params).unwrap();
        let aug_of_rob = augmented_objective(&robust, &basis, &data, &params).unwrap();
        assert!(aug_of_aug <= aug_of_std + 1e-8);
        assert!(aug_of_aug <= aug_of_rob + 1e-8);
    }

    #[test]
    fn augmented_fit_is_stationary() {
        let (params, basis, penalty) = setup(1.0, 2);
        let data = sample_dataset(&params, 10, 19);
        let lambda = 0.03;
        let model = fit_augmented(&basis, &penalty, &data, &params, lambda).unwrap();
        // finite-difference stationarity of the augmented objective
        let f0 = augmented_objective(&model, &basis, &data, &params).unwrap();
        let h = 1e-6;
        for i in 0..basis.dim() {
            let mut bumped = model.clone();
            bumped.theta[i] += h;
            let f1 = augmented_objective(&bumped, &basis, &data, &params).unwrap();
            let deriv = (f1 - f0) / h;
            assert!(deriv.abs() < 1e-4, "coordinate {i}: derivative {deriv}");
        }
    }

    #[test]
    fn objectives_vanish_for_zero_model_and_targets() {
        let (params, basis, _) = setup(0.0, 2);
        let mut data = sample_dataset(&params, 10, 23);
        data.ys.iter_mut().for_each(|y| *y = 0.0);
        let model = FittedModel {
            theta: vec![0.0; basis.dim()],
            lambda: 0.3,
            kind: EstimatorKind::Standard,
            basis_fingerprint: basis.fingerprint(),
        };
        assert_eq!(standard_objective(&model, &basis, &data).unwrap(), 0.0);
        assert_eq!(robust_objective(&model, &basis, &data, &params).unwrap(), 0.0);
        assert_eq!(
            augmented_objective(&model, &basis, &data, &params).unwrap(),
            0.0
        );
    }

    #[test]
    fn affine_models_have_zero_norm() {
        let (_, basis, penalty) = setup(1.0, 3);
        let theta: Vec<f64> = basis
            .greville_abscissae()
            .iter()
            .map(|&g| 2.0 * g - 0.7)
            .collect();
        let model = FittedModel {
            theta,
            lambda: 0.1,
            kind: EstimatorKind::Standard,
            basis_fingerprint: basis.fingerprint(),
        };
        let norm = model_norm(&model, &penalty).unwrap();
        assert!(norm.abs() < 1e-10, "affine norm {norm}");
    }

    #[test]
    fn robust_objective_dominates_standard() {
        let (params, basis, _) = setup(1.0, 2);
        let data = sample_dataset(&params, 20, 29);
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let model = FittedModel {
                theta: (0..basis.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                lambda: 0.05,
                kind: EstimatorKind::Standard,
                basis_fingerprint: basis.fingerprint(),
            };
            let rob = robust_objective(&model, &basis, &data, &params).unwrap();
            let std = standard_objective(&model, &basis, &data).unwrap();
            assert!(rob - std >= -1e-12, "robust {rob} < standard {std}");
        }
    }

    #[test]
    fn norm_is_monotone_in_lambda() {
        let (params, basis, penalty) = setup(1.0, 3);
        let data = sample_dataset(&params, 40, 31);
        let grid: Vec<f64> = (0..10).map(|k| 1e-5 * 10f64.powf(k as f64 * 7.0 / 9.0)).collect();
        let mut last = f64::INFINITY;
        for &lambda in &grid {
            let model = fit_standard(&basis, &penalty, &data, lambda).unwrap();
            let norm = model_norm(&model, &penalty).unwrap();
            assert!(norm <= last + 1e-9, "norm rose at lambda = {lambda}");
            last = norm;
        }
    }

    #[test]
    fn model_json_has_expected_shape() {
        let (_, basis, penalty) = setup(1.0, 1);
        let params = StaircaseParams::new(1, 1, 0.1, 0.4, 0.2, 1.0).unwrap();
        let data = sample_dataset(&params, 6, 37);
        let model = fit_standard(&basis, &penalty, &data, 0.1).unwrap();
        let json = serde_json::to_value(&model).unwrap();
        let obj = json.as_object().unwrap();
        assert_eq!(obj.len(), 3);
        assert!(obj.contains_key("theta"));
        assert!(obj.contains_key("lambda"));
        assert_eq!(obj["kind"], "standard");
        let back: FittedModel = serde_json::from_value(json).unwrap();
        assert_eq!(back.theta, model.theta);
    }

    #[test]
    fn lambda_zero_allowed_for_robust_with_enough_data() {
        let (params, basis, penalty) = setup(1.0, 1);
        let data = sample_dataset(&params, 40, 41);
        let cfg = SolverConfig::default();
        let model = fit_robust(&basis, &penalty, &data, &params, 0.0, &cfg).unwrap();
        assert_eq!(model.theta.len(), basis.dim());
        assert!(model.theta.iter().all(|t| t.is_finite()));
    }

    #[test]
    fn fingerprints_distinguish_models() {
        let (params, basis, penalty) = setup(1.0, 2);
        let data = sample_dataset(&params, 10, 43);
        let a = fit_standard(&basis, &penalty, &data, 0.1).unwrap();
        let b = fit_standard(&basis, &penalty, &data, 0.2).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
    }

}
