//! Experiment orchestration: sample-size sweeps over a λ grid with trial
//! averaging, deterministic seeding, CSV emission, and plot generation.
//!
//! Datasets are shared across estimators and λ values within a (n, trial)
//! cell (a paired design), so differences between estimators are not
//! polluted by data resampling noise. Every stochastic component draws its
//! seed from the base seed through a stable hash, which makes whole sweeps
//! reproducible byte for byte.

pub mod cli;
pub mod plot;

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{sample_dataset, StaircaseParams};
use crate::error::{Error, Result};
use crate::estimators::{
    fit_augmented, fit_robust, fit_standard, model_norm, EstimatorKind, FittedModel, SolverConfig,
};
use crate::hash::{derive_seed, Fingerprint};
use crate::metrics::{
    empirical_mse, empirical_robust_mse, population_mse, population_robust_mse, MetricRecord,
};
use crate::rst::{fit_rst, sample_unlabeled};
use crate::spline::{build_basis, build_penalty};

/// Environment variable capping the harness thread count.
pub const THREADS_ENV: &str = "STAIRCASE_THREADS";

fn default_sample_sizes() -> Vec<usize> {
    vec![10, 20, 40, 100, 250, 1000, 5000, 25000]
}

fn default_lambda_grid() -> Vec<f64> {
    // 10 logarithmically spaced points in [1e-5, 1e2]
    (0..10)
        .map(|k| 10f64.powf(-5.0 + 7.0 * k as f64 / 9.0))
        .collect()
}

fn default_trials() -> usize {
    5
}

fn default_unlabeled_count() -> usize {
    1000
}

fn default_mc_samples() -> usize {
    20_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: StaircaseParams,
    #[serde(default = "default_sample_sizes")]
    pub sample_sizes: Vec<usize>,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub estimators: Vec<EstimatorKind>,
    #[serde(default = "default_unlabeled_count")]
    pub unlabeled_count: usize,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default)]
    pub base_seed: u64,
}

impl ExperimentConfig {
    /// Default grids for the given parameters and estimator subset.
    pub fn new(params: StaircaseParams, estimators: Vec<EstimatorKind>) -> Self {
        ExperimentConfig {
            params,
            sample_sizes: default_sample_sizes(),
            lambda_grid: default_lambda_grid(),
            trials: default_trials(),
            estimators,
            unlabeled_count: default_unlabeled_count(),
            mc_samples: default_mc_samples(),
            base_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_sizes.is_empty() {
            return Err(Error::Config("sample_sizes must be nonempty".to_string()));
        }
        if self.sample_sizes.iter().any(|&n| n == 0) {
            return Err(Error::Config("sample sizes must be positive".to_string()));
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::Config("lambda_grid must be nonempty".to_string()));
        }
        if self.lambda_grid.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::Config(
                "lambda_grid entries must be positive and finite".to_string(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".to_string()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("estimators must be nonempty".to_string()));
        }
        let unique: BTreeSet<&str> = self.estimators.iter().map(|e| e.as_str()).collect();
        if unique.len() != self.estimators.len() {
            return Err(Error::Config("estimators must be distinct".to_string()));
        }
        if self.mc_samples == 0 {
            return Err(Error::Config("mc_samples must be at least 1".to_string()));
        }
        Ok(())
    }

    pub fn fingerprint(&self) -> u64 {
        let mut fp = Fingerprint::new("experiment-config");
        fp.push_u64(self.params.fingerprint());
        for &n in &self.sample_sizes {
            fp.push_u64(n as u64);
        }
        fp.push_f64s(&self.lambda_grid);
        fp.push_u64(self.trials as u64);
        for e in &self.estimators {
            fp.push_str(e.as_str());
        }
        fp.push_u64(self.unlabeled_count as u64)
            .push_u64(self.mc_samples as u64)
            .push_u64(self.base_seed);
        fp.finish()
    }

    /// Seed of the dataset shared by every estimator and λ in one
    /// (n, trial) cell.
    pub fn dataset_seed(&self, n: usize, trial: usize) -> u64 {
        derive_seed(self.base_seed, "data", &[n as u64, trial as u64])
    }

    fn unlabeled_seed(&self, n: usize, trial: usize) -> u64 {
        derive_seed(self.base_seed, "unlabeled", &[n as u64, trial as u64])
    }

    fn mc_seed(&self, est: EstimatorKind, n: usize, lambda_idx: usize, trial: usize) -> u64 {
        let est_id = EstimatorKind::ALL.iter().position(|e| *e == est).unwrap() as u64;
        derive_seed(
            self.base_seed,
            "mc",
            &[est_id, n as u64, lambda_idx as u64, trial as u64],
        )
    }
}

/// Chosen λ for one (estimator, n) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestLambda {
    pub estimator: EstimatorKind,
    pub n: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<MetricRecord>,
    pub best_lambda: Vec<BestLambda>,
    pub config_fingerprint: u64,
    /// Human-readable descriptions of cells that failed (sweep keeps going).
    pub failures: Vec<String>,
}

impl SweepResult {
    pub fn best_lambda_for(&self, estimator: EstimatorKind, n: usize) -> Option<f64> {
        self.best_lambda
            .iter()
            .find(|b| b.estimator == estimator && b.n == n)
            .map(|b| b.lambda)
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        match raw.parse::<usize>() {
            Ok(k) if k > 0 => builder = builder.num_threads(k),
            _ => log::warn!("ignoring invalid {THREADS_ENV}={raw}"),
        }
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("could not build thread pool: {e}")))
}

/// Run every (estimator, n, λ, trial) cell of the sweep. Individual cell
/// failures are recorded in the result, not fatal.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let params = &config.params;
    let basis = build_basis(params.s, params.epsilon)?;
    let penalty = build_penalty(&basis);
    let solver = SolverConfig::default();

    #[derive(Clone, Copy)]
    struct Cell {
        est: EstimatorKind,
        n: usize,
        lambda_idx: usize,
        trial: usize,
    }
    let mut cells = Vec::new();
    for &est in &config.estimators {
        for &n in &config.sample_sizes {
            for lambda_idx in 0..config.lambda_grid.len() {
                for trial in 0..config.trials {
                    cells.push(Cell {
                        est,
                        n,
                        lambda_idx,
                        trial,
                    });
                }
            }
        }
    }

    let run_cell = |cell: &Cell| -> Result<MetricRecord> {
        let lambda = config.lambda_grid[cell.lambda_idx];
        let dataset_seed = config.dataset_seed(cell.n, cell.trial);
        let data = sample_dataset(params, cell.n, dataset_seed);

        let model: FittedModel = match cell.est {
            EstimatorKind::Standard => fit_standard(&basis, &penalty, &data, lambda)?,
            EstimatorKind::Robust => {
                fit_robust(&basis, &penalty, &data, params, lambda, &solver)?
            }
            EstimatorKind::Augmented => fit_augmented(&basis, &penalty, &data, params, lambda)?,
            EstimatorKind::Rst => {
                let unlabeled = sample_unlabeled(
                    params,
                    config.unlabeled_count,
                    config.unlabeled_seed(cell.n, cell.trial),
                );
                fit_rst(&basis, &penalty, &data, &unlabeled, params, lambda, &solver)?
            }
        };

        let test_mse = population_mse(&model, &basis, params)?;
        let train_mse = empirical_mse(&model, &basis, &data)?;
        let robust_train_mse = empirical_robust_mse(&model, &basis, &data, params)?;
        let robust_test_mse = population_robust_mse(
            &model,
            &basis,
            params,
            config.mc_samples,
            config.mc_seed(cell.est, cell.n, cell.lambda_idx, cell.trial),
        )?;
        let norm = model_norm(&model, &penalty)?;

        Ok(MetricRecord {
            estimator_kind: cell.est,
            n: cell.n,
            lambda,
            trial_seed: dataset_seed,
            test_mse,
            train_mse,
            gen_gap: test_mse - train_mse,
            robust_train_mse,
            robust_test_mse,
            norm,
        })
    };

    let pool = thread_pool()?;
    let outcomes: Vec<(Cell, Result<MetricRecord>)> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| (*cell, run_cell(cell)))
            .collect()
    });

    let mut records = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (cell, outcome) in outcomes {
        match outcome {
            Ok(record) => records.push(record),
            Err(err) => {
                let message = format!(
                    "estimator={} n={} lambda={} trial={}: {err}",
                    cell.est, cell.n, config.lambda_grid[cell.lambda_idx], cell.trial
                );
                log::warn!("sweep cell failed: {message}");
                failures.push(message);
            }
        }
    }

    let mut best_lambda = Vec::new();
    for &est in &config.estimators {
        for &n in &config.sample_sizes {
            if let Ok(lambda) = select_best_lambda(&records, est, n) {
                best_lambda.push(BestLambda {
                    estimator: est,
                    n,
                    lambda,
                });
            }
        }
    }

    Ok(SweepResult {
        records,
        best_lambda,
        config_fingerprint: config.fingerprint(),
        failures,
    })
}

/// λ minimizing the trial-mean test MSE for the (estimator, n) cell; ties
/// break toward the smaller λ.
pub fn select_best_lambda(
    records: &[MetricRecord],
    estimator: EstimatorKind,
    n: usize,
) -> Result<f64> {
    let mut by_lambda: Vec<(f64, f64, usize)> = Vec::new(); // (λ, sum, count)
    for r in records {
        if r.estimator_kind != estimator || r.n != n {
            continue;
        }
        match by_lambda.iter_mut().find(|(l, _, _)| *l == r.lambda) {
            Some(entry) => {
                entry.1 += r.test_mse;
                entry.2 += 1;
            }
            None => by_lambda.push((r.lambda, r.test_mse, 1)),
        }
    }
    if by_lambda.is_empty() {
        return Err(Error::Config(format!(
            "no records for estimator={estimator} n={n}"
        )));
    }
    by_lambda.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = by_lambda[0].0;
    let mut best_mean = by_lambda[0].1 / by_lambda[0].2 as f64;
    for &(lambda, sum, count) in &by_lambda[1..] {
        let mean = sum / count as f64;
        if mean < best_mean {
            best = lambda;
            best_mean = mean;
        }
    }
    Ok(best)
}

/// A metric column of [`MetricRecord`], for sweep analysis helpers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricField {
    TestMse,
    TrainMse,
    GenGap,
    RobustTrainMse,
    RobustTestMse,
    Norm,
}

impl MetricField {
    pub fn of(&self, r: &MetricRecord) -> f64 {
        match self {
            MetricField::TestMse => r.test_mse,
            MetricField::TrainMse => r.train_mse,
            MetricField::GenGap => r.gen_gap,
            MetricField::RobustTrainMse => r.robust_train_mse,
            MetricField::RobustTestMse => r.robust_test_mse,
            MetricField::Norm => r.norm,
        }
    }
}

/// Per-trial values (keyed by trial seed) of a metric at the given λ.
pub fn trial_values(
    records: &[MetricRecord],
    estimator: EstimatorKind,
    n: usize,
    lambda: f64,
    field: MetricField,
) -> Vec<(u64, f64)> {
    let mut values: Vec<(u64, f64)> = records
        .iter()
        .filter(|r| r.estimator_kind == estimator && r.n == n && r.lambda == lambda)
        .map(|r| (r.trial_seed, field.of(r)))
        .collect();
    values.sort_by_key(|&(seed, _)| seed);
    values
}

/// Per-trial paired differences (a − b) of a metric at each estimator's own
/// best λ, matched by trial seed.
pub fn paired_diffs_at_best(
    result: &SweepResult,
    a: EstimatorKind,
    b: EstimatorKind,
    n: usize,
    field: MetricField,
) -> Result<Vec<f64>> {
    let la = result
        .best_lambda_for(a, n)
        .ok_or_else(|| Error::Config(format!("no best lambda for {a} at n={n}")))?;
    let lb = result
        .best_lambda_for(b, n)
        .ok_or_else(|| Error::Config(format!("no best lambda for {b} at n={n}")))?;
    let va = trial_values(&result.records, a, n, la, field);
    let vb = trial_values(&result.records, b, n, lb, field);
    let mut diffs = Vec::new();
    for (seed, value_a) in va {
        if let Some(&(_, value_b)) = vb.iter().find(|(s, _)| *s == seed) {
            diffs.push(value_a - value_b);
        }
    }
    if diffs.is_empty() {
        return Err(Error::Config(format!(
            "no paired trials for {a} vs {b} at n={n}"
        )));
    }
    Ok(diffs)
}

/// Sample mean and standard deviation (n−1 denominator; 0 for single values).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Write the records as CSV with the exact [`MetricRecord`] column order.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    if result.records.is_empty() {
        return Err(Error::Config(
            "sweep produced no records; refusing to write an empty CSV".to_string(),
        ));
    }
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    for record in &result.records {
        writer.serialize(record).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    }
    writer.flush().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

/// Read records back from a CSV produced by [`emit_csv`].
pub fn read_records_csv(path: &Path) -> Result<Vec<MetricRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut records = Vec::new();
    for row in reader.deserialize() {
        let record: MetricRecord = row.map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Rebuild a [`SweepResult`] from bare records (e.g. parsed from CSV): the
/// best-λ map is recomputed from the data.
pub fn result_from_records(records: Vec<MetricRecord>) -> SweepResult {
    let mut keys: Vec<(EstimatorKind, usize)> = Vec::new();
    for r in &records {
        if !keys.contains(&(r.estimator_kind, r.n)) {
            keys.push((r.estimator_kind, r.n));
        }
    }
    let mut best_lambda = Vec::new();
    for (est, n) in keys {
        if let Ok(lambda) = select_best_lambda(&records, est, n) {
            best_lambda.push(BestLambda {
                estimator: est,
                n,
                lambda,
            });
        }
    }
    SweepResult {
        records,
        best_lambda,
        config_fingerprint: 0,
        failures: Vec::new(),
    }
}
