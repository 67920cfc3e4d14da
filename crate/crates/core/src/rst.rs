//! Robust self-training: pseudo-label unlabeled inputs with the standard
//! estimator, then robust-fit the union of labeled and pseudo-labeled data.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distribution::{Dataset, InputSampler, StaircaseParams};
use crate::error::{Error, Result};
use crate::estimators::{
    fit_robust, fit_standard, EstimatorKind, FittedModel, SolverConfig,
};
use crate::spline::{predict, PenaltyMatrix, SplineBasis};

/// Unlabeled inputs drawn from the marginal P_x.
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledSet {
    pub xs: Vec<f64>,
    pub seed: u64,
}

impl UnlabeledSet {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// Inputs with targets generated by a standard model.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoLabeledSet {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Fingerprint of the model that produced the targets.
    pub source_model: u64,
}

/// The intermediate artifacts of one robust self-training run.
#[derive(Debug, Clone)]
pub struct RstPipeline {
    pub standard: FittedModel,
    pub pseudo: PseudoLabeledSet,
    pub model: FittedModel,
}

/// Draw `count` inputs from the marginal, exactly as [`sample_dataset`] does
/// for its inputs but without targets.
///
/// [`sample_dataset`]: crate::distribution::sample_dataset
pub fn sample_unlabeled(params: &StaircaseParams, count: usize, seed: u64) -> UnlabeledSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = InputSampler::new(params);
    let xs = (0..count).map(|_| sampler.sample(&mut rng).0).collect();
    UnlabeledSet { xs, seed }
}

/// Evaluate the model at every unlabeled input. The targets are bit-exact
/// model predictions.
pub fn pseudo_label(
    model: &FittedModel,
    basis: &SplineBasis,
    unlabeled: &UnlabeledSet,
) -> Result<PseudoLabeledSet> {
    let mut ys = Vec::with_capacity(unlabeled.len());
    for &x in &unlabeled.xs {
        ys.push(predict(basis, &model.theta, x)?);
    }
    Ok(PseudoLabeledSet {
        xs: unlabeled.xs.clone(),
        ys,
        source_model: model.fingerprint(),
    })
}

/// Robust self-training with a shared regularization strength:
/// (1) standard fit on the labeled data, (2) pseudo-targets on the unlabeled
/// inputs, (3) union dataset, (4) robust fit on the union.
pub fn fit_rst(
    basis: &SplineBasis,
    penalty: &PenaltyMatrix,
    labeled: &Dataset,
    unlabeled: &UnlabeledSet,
    params: &StaircaseParams,
    lambda: f64,
    config: &SolverConfig,
) -> Result<FittedModel> {
    fit_rst_pipeline(basis, penalty, labeled, unlabeled, params, lambda, config)
        .map(|pipeline| pipeline.model)
}

/// As [`fit_rst`], returning the intermediate standard model and pseudo-labels.
pub fn fit_rst_pipeline(
    basis: &SplineBasis,
    penalty: &PenaltyMatrix,
    labeled: &Dataset,
    unlabeled: &UnlabeledSet,
    params: &StaircaseParams,
    lambda: f64,
    config: &SolverConfig,
) -> Result<RstPipeline> {
    if labeled.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParams(format!(
            "robust self-training requires lambda > 0 (got {lambda})"
        )));
    }

    let standard = fit_standard(basis, penalty, labeled, lambda)?;
    let pseudo = pseudo_label(&standard, basis, unlabeled)?;

    let mut xs = labeled.xs.clone();
    xs.extend_from_slice(&pseudo.xs);
    let mut ys = labeled.ys.clone();
    ys.extend_from_slice(&pseudo.ys);
    let union = Dataset {
        xs,
        ys,
        seed: labeled.seed,
        params_fingerprint: labeled.params_fingerprint,
    };

    let mut model = fit_robust(basis, penalty, &union, params, lambda, config)?;
    model.kind = EstimatorKind::Rst;
    Ok(RstPipeline {
        standard,
        pseudo,
        model,
    })
}
