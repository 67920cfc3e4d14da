//! The staircase data distribution: a finite support of anchor points at the
//! integers 0..s−1 plus perturbation points at ±ε around each anchor, with
//! targets y = m·⌊x⌉ + σv.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hash::Fingerprint;

/// Unnormalized weight of the stairs beyond the first `s0` heavy ones.
pub const TAIL_WEIGHT: f64 = 0.01;

/// Full specification of the generative model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct StaircaseParams {
    /// Number of stairs.
    pub s: usize,
    /// Number of heavy stairs (the rest carry the small tail weight).
    pub s0: usize,
    /// Probability of drawing a perturbation point.
    pub delta: f64,
    /// Perturbation size, in (0, ½) so that ⌊x ± ε⌉ = x on the anchors.
    pub epsilon: f64,
    /// Standard deviation of the target noise.
    pub sigma: f64,
    /// Slope of the optimal predictor f*(x) = m⌊x⌉.
    pub m: f64,
    /// Distribution over stairs; defaults to [`build_weights`].
    pub weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    s: usize,
    s0: usize,
    delta: f64,
    epsilon: f64,
    sigma: f64,
    m: f64,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

impl TryFrom<RawParams> for StaircaseParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        match raw.weights {
            Some(weights) => StaircaseParams::with_weights(
                raw.s, raw.s0, raw.delta, raw.epsilon, raw.sigma, raw.m, weights,
            ),
            None => StaircaseParams::new(raw.s, raw.s0, raw.delta, raw.epsilon, raw.sigma, raw.m),
        }
    }
}

impl From<StaircaseParams> for RawParams {
    fn from(p: StaircaseParams) -> Self {
        RawParams {
            s: p.s,
            s0: p.s0,
            delta: p.delta,
            epsilon: p.epsilon,
            sigma: p.sigma,
            m: p.m,
            weights: Some(p.weights),
        }
    }
}

impl StaircaseParams {
    /// Construct with the standard stair weights from [`build_weights`].
    pub fn new(s: usize, s0: usize, delta: f64, epsilon: f64, sigma: f64, m: f64) -> Result<Self> {
        let weights = build_weights(s, s0)?;
        Self::with_weights(s, s0, delta, epsilon, sigma, m, weights)
    }

    /// Construct with explicit stair weights (must form a distribution).
    pub fn with_weights(
        s: usize,
        s0: usize,
        delta: f64,
        epsilon: f64,
        sigma: f64,
        m: f64,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParams("s must be at least 1".to_string()));
        }
        if s0 == 0 || s0 > s {
            return Err(Error::InvalidParams(format!(
                "s0 must satisfy 1 <= s0 <= s (got s0={s0}, s={s})"
            )));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParams(format!(
                "delta must lie in [0, 1] (got {delta})"
            )));
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidParams(format!(
                "epsilon must lie in (0, 0.5) (got {epsilon})"
            )));
        }
        if !(sigma >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "sigma must be nonnegative (got {sigma})"
            )));
        }
        if !m.is_finite() {
            return Err(Error::InvalidParams("m must be finite".to_string()));
        }
        if weights.len() != s {
            return Err(Error::InvalidParams(format!(
                "weights must have length s={s} (got {})",
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidParams(
                "weights must be nonnegative".to_string(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "weights must sum to 1 within 1e-12 (got {total})"
            )));
        }
        Ok(StaircaseParams {
            s,
            s0,
            delta,
            epsilon,
            sigma,
            m,
            weights,
        })
    }

    /// Default experiment parameters with the given slope: ten stairs, five
    /// heavy, a 5% perturbation rate and mild target noise. This combination
    /// keeps the small-sample tradeoff visible at m = 1 while leaving the
    /// self-trained estimator enough signal to recover the staircase.
    pub fn defaults(m: f64) -> Self {
        StaircaseParams::new(10, 5, 0.05, 0.4, 0.1, m).expect("default parameters are valid")
    }

    /// Stable 64-bit fingerprint of every field.
    pub fn fingerprint(&self) -> u64 {
        let mut fp = Fingerprint::new("staircase-params");
        fp.push_u64(self.s as u64)
            .push_u64(self.s0 as u64)
            .push_f64(self.delta)
            .push_f64(self.epsilon)
            .push_f64(self.sigma)
            .push_f64(self.m)
            .push_f64s(&self.weights);
        fp.finish()
    }
}

/// One point of the finite support with its exact probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportAtom {
    pub x: f64,
    pub anchor: i64,
    pub prob: f64,
}

/// A sampled training set. `xs` and `ys` have the same length; the seed and
/// parameter fingerprint identify its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub seed: u64,
    pub params_fingerprint: u64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// Stair weights: the first `s0` stairs share weight 1/s0 each, the rest get
/// the fixed tail weight, and the whole vector is normalized.
pub fn build_weights(s: usize, s0: usize) -> Result<Vec<f64>> {
    if s == 0 {
        return Err(Error::InvalidParams("s must be at least 1".to_string()));
    }
    if s0 == 0 || s0 > s {
        return Err(Error::InvalidParams(format!(
            "s0 must satisfy 1 <= s0 <= s (got s0={s0}, s={s})"
        )));
    }
    let raw: Vec<f64> = (0..s)
        .map(|j| if j < s0 { 1.0 / s0 as f64 } else { TAIL_WEIGHT })
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// The 3s support atoms in stair order: anchor, anchor−ε, anchor+ε.
pub fn support(params: &StaircaseParams) -> Vec<SupportAtom> {
    let mut atoms = Vec::with_capacity(3 * params.s);
    for j in 0..params.s {
        let w = params.weights[j];
        let a = j as f64;
        atoms.push(SupportAtom {
            x: a,
            anchor: j as i64,
            prob: w * (1.0 - params.delta),
        });
        atoms.push(SupportAtom {
            x: a - params.epsilon,
            anchor: j as i64,
            prob: w * params.delta / 2.0,
        });
        atoms.push(SupportAtom {
            x: a + params.epsilon,
            anchor: j as i64,
            prob: w * params.delta / 2.0,
        });
    }
    atoms
}

/// Nearest integer to x, ties to even. Ties never occur on the support since
/// ε < ½.
pub fn round_to_anchor(x: f64) -> f64 {
    x.round_ties_even()
}

/// The optimal predictor f*(x) = m·⌊x⌉.
pub fn f_star(params: &StaircaseParams, x: f64) -> f64 {
    params.m * round_to_anchor(x)
}

/// The invariance set B(x) = {a, a−ε, a+ε} with a = ⌊x⌉. Identical for every
/// member of the set.
pub fn invariance_set(params: &StaircaseParams, x: f64) -> [f64; 3] {
    let a = round_to_anchor(x);
    [a, a - params.epsilon, a + params.epsilon]
}

/// Sampler over the input marginal. Deterministic given the RNG stream.
pub(crate) struct InputSampler<'a> {
    params: &'a StaircaseParams,
    cumulative: Vec<f64>,
}

impl<'a> InputSampler<'a> {
    pub fn new(params: &'a StaircaseParams) -> Self {
        let mut cumulative = Vec::with_capacity(params.s);
        let mut acc = 0.0;
        for &w in &params.weights {
            acc += w;
            cumulative.push(acc);
        }
        InputSampler { params, cumulative }
    }

    /// One draw from the marginal; returns (x, stair index).
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> (f64, usize) {
        let u: f64 = rng.gen();
        let stair = match self
            .cumulative
            .iter()
            .position(|&c| u < c)
        {
            Some(j) => j,
            None => self.params.s - 1,
        };
        let v: f64 = rng.gen();
        let x = if v < 1.0 - self.params.delta {
            stair as f64
        } else if v < 1.0 - self.params.delta / 2.0 {
            stair as f64 - self.params.epsilon
        } else {
            stair as f64 + self.params.epsilon
        };
        (x, stair)
    }
}

/// Draw `n` i.i.d. samples (xᵢ, yᵢ) with y = f*(x) + σv, v ~ N(0,1).
/// The same (params, n, seed) always reproduces the identical dataset.
pub fn sample_dataset(params: &StaircaseParams, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = InputSampler::new(params);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let (x, _) = sampler.sample(&mut rng);
        let v: f64 = rng.sample(StandardNormal);
        xs.push(x);
        ys.push(f_star(params, x) + params.sigma * v);
    }
    Dataset {
        xs,
        ys,
        seed,
        params_fingerprint: params.fingerprint(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_uniform_when_all_heavy() {
        let w = build_weights(5, 5).unwrap();
        assert_eq!(w, vec![0.2; 5]);
    }

    #[test]
    fn weights_with_tail() {
        let w = build_weights(10, 5).unwrap();
        for j in 0..5 {
            assert_abs_diff_eq!(w[j], 0.2 / 1.05, epsilon = 1e-15);
        }
        for j in 5..10 {
            assert_abs_diff_eq!(w[j], 0.01 / 1.05, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn weights_single_stair() {
        assert_eq!(build_weights(1, 1).unwrap(), vec![1.0]);
    }

    #[test]
    fn weights_reject_bad_inputs() {
        assert!(build_weights(0, 0).is_err());
        assert!(build_weights(3, 4).is_err());
        assert!(build_weights(3, 0).is_err());
    }

    #[test]
    fn support_single_stair() {
        let p = StaircaseParams::new(1, 1, 0.1, 0.3, 0.0, 1.0).unwrap();
        let atoms = support(&p);
        assert_eq!(atoms.len(), 3);
        assert_abs_diff_eq!(atoms[0].x, 0.0);
        assert_abs_diff_eq!(atoms[0].prob, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(atoms[1].x, -0.3);
        assert_abs_diff_eq!(atoms[1].prob, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(atoms[2].x, 0.3);
        assert_abs_diff_eq!(atoms[2].prob, 0.05, epsilon = 1e-15);
    }

    #[test]
    fn support_probabilities_sum_to_one() {
        for (s, s0, delta) in [(1, 1, 0.0), (5, 5, 0.3), (10, 5, 0.01), (7, 2, 1.0)] {
            let p = StaircaseParams::new(s, s0, delta, 0.4, 0.2, 1.0).unwrap();
            let total: f64 = support(&p).iter().map(|a| a.prob).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            let anchor_mass: f64 = support(&p)
                .iter()
                .filter(|a| a.x == a.anchor as f64)
                .map(|a| a.prob)
                .sum();
            assert_abs_diff_eq!(anchor_mass, 1.0 - delta, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_zero_puts_all_mass_on_anchors() {
        let p = StaircaseParams::new(3, 3, 0.0, 0.2, 0.0, 1.0).unwrap();
        for atom in support(&p) {
            if atom.x != atom.anchor as f64 {
                assert_eq!(atom.prob, 0.0);
            }
        }
    }

    #[test]
    fn f_star_rounds_to_anchor() {
        let p = StaircaseParams::new(10, 5, 0.01, 0.3, 0.0, 1.0).unwrap();
        assert_eq!(f_star(&p, 2.3), 2.0);
        assert_eq!(f_star(&p, 4.0), 4.0);
        let p0 = StaircaseParams::new(10, 5, 0.01, 0.3, 0.0, 0.0).unwrap();
        assert_eq!(f_star(&p0, 1.7), 0.0);
        assert_eq!(f_star(&p0, -0.3), 0.0);
    }

    #[test]
    fn invariance_set_matches_anchor() {
        let p = StaircaseParams::new(10, 5, 0.01, 0.2, 0.0, 1.0).unwrap();
        assert_eq!(invariance_set(&p, 1.8), [2.0, 1.8, 2.2]);
        let p4 = StaircaseParams::new(10, 5, 0.01, 0.4, 0.0, 1.0).unwrap();
        assert_eq!(invariance_set(&p4, 3.0), [3.0, 2.6, 3.4]);
    }

    #[test]
    fn invariance_set_constant_on_its_members() {
        let p = StaircaseParams::new(6, 3, 0.2, 0.35, 0.0, 1.0).unwrap();
        for x in [0.0, 1.65, 2.35, 5.0] {
            let set = invariance_set(&p, x);
            for member in set {
                assert_eq!(invariance_set(&p, member), set);
                assert_eq!(f_star(&p, member), f_star(&p, x));
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = StaircaseParams::defaults(1.0);
        let d1 = sample_dataset(&p, 100, 42);
        let d2 = sample_dataset(&p, 100, 42);
        assert_eq!(d1, d2);
        let d3 = sample_dataset(&p, 100, 43);
        assert_ne!(d1, d3);
    }

    #[test]
    fn noiseless_zero_slope_gives_zero_targets() {
        let p = StaircaseParams::new(5, 5, 0.1, 0.4, 0.0, 0.0).unwrap();
        let d = sample_dataset(&p, 200, 7);
        assert!(d.ys.iter().all(|&y| y == 0.0));
    }

    #[test]
    fn samples_lie_on_the_support() {
        let p = StaircaseParams::defaults(1.0);
        let atoms = support(&p);
        let d = sample_dataset(&p, 1000, 3);
        for &x in &d.xs {
            let dist = atoms
                .iter()
                .map(|a| (a.x - x).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(dist < 1e-9, "x = {x} off support");
        }
    }

    #[test]
    fn empirical_frequencies_match_uniform_weights() {
        // δ = 0, uniform stairs: binomial concentration at n = 1e5.
        let p = StaircaseParams::new(5, 5, 0.0, 0.4, 0.0, 0.0).unwrap();
        let n = 100_000;
        let d = sample_dataset(&p, n, 11);
        let mut counts = [0usize; 5];
        for &x in &d.xs {
            counts[x as usize] += 1;
        }
        let bound = 3.0 * (0.2 * 0.8 / n as f64).sqrt();
        for &c in &counts {
            let freq = c as f64 / n as f64;
            assert!((freq - 0.2).abs() < bound, "freq {freq}");
        }
    }

    #[test]
    fn noise_moments_match() {
        let p = StaircaseParams::new(10, 5, 0.01, 0.4, 0.2, 1.0).unwrap();
        let n = 100_000;
        let d = sample_dataset(&p, n, 19);
        let residuals: Vec<f64> = d
            .xs
            .iter()
            .zip(&d.ys)
            .map(|(&x, &y)| y - f_star(&p, x))
            .collect();
        let mean = residuals.iter().sum::<f64>() / n as f64;
        let var = residuals.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 3.0 * 0.2 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 0.04).abs() < 0.05 * 0.04, "var {var}");
    }

    #[test]
    fn empirical_marginal_matches_support_probabilities() {
        let p = StaircaseParams::defaults(1.0);
        let atoms = support(&p);
        let n = 100_000;
        let d = sample_dataset(&p, n, 23);
        let mut counts = vec![0usize; atoms.len()];
        for &x in &d.xs {
            let idx = atoms
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    (a.x - x).abs().partial_cmp(&(b.x - x).abs()).unwrap()
                })
                .map(|(i, _)| i)
                .unwrap();
            counts[idx] += 1;
        }
        for (atom, &c) in atoms.iter().zip(&counts) {
            let freq = c as f64 / n as f64;
            let se = (atom.prob * (1.0 - atom.prob) / n as f64).sqrt();
            assert!(
                (freq - atom.prob).abs() <= 4.0 * se + 1e-9,
                "atom {} freq {freq} prob {}",
                atom.x,
                atom.prob
            );
        }
    }

    #[test]
    fn params_json_round_trip_and_unknown_fields() {
        let p = StaircaseParams::defaults(1.0);
        let json = serde_json::to_string(&p).unwrap();
        let back: StaircaseParams = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);

        let with_unknown = r#"{"s":2,"s0":1,"delta":0.1,"epsilon":0.3,"sigma":0.0,"m":1.0,"bogus":3}"#;
        assert!(serde_json::from_str::<StaircaseParams>(with_unknown).is_err());

        let without_weights = r#"{"s":2,"s0":1,"delta":0.1,"epsilon":0.3,"sigma":0.0,"m":1.0}"#;
        let parsed: StaircaseParams = serde_json::from_str(without_weights).unwrap();
        assert_eq!(parsed.weights, build_weights(2, 1).unwrap());
    }

    #[test]
    fn params_validation() {
        assert!(StaircaseParams::new(0, 1, 0.1, 0.3, 0.0, 1.0).is_err());
        assert!(StaircaseParams::new(3, 4, 0.1, 0.3, 0.0, 1.0).is_err());
        assert!(StaircaseParams::new(3, 3, 1.5, 0.3, 0.0, 1.0).is_err());
        assert!(StaircaseParams::new(3, 3, 0.1, 0.5, 0.0, 1.0).is_err());
        assert!(StaircaseParams::new(3, 3, 0.1, 0.0, 0.0, 1.0).is_err());
        assert!(StaircaseParams::new(3, 3, 0.1, 0.3, -0.1, 1.0).is_err());
        assert!(
            StaircaseParams::with_weights(2, 1, 0.1, 0.3, 0.0, 1.0, vec![0.6, 0.5]).is_err()
        );
    }
}
