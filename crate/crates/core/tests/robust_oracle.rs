//! Cross-validation of the robust fitter against an independent
//! projected-subgradient oracle on the raw min-max objective.

mod common;

use common::{subgradient_best_objective, RobustObjective};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use staircase::distribution::{sample_dataset, StaircaseParams};
use staircase::estimators::{fit_robust_diagnostics, fit_standard, SolverConfig};
use staircase::spline::{build_basis, build_penalty};

#[test]
fn robust_fit_matches_subgradient_oracle_on_small_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(1717);
    let cfg = SolverConfig::default();
    for case in 0..10 {
        let s = 1 + case % 3;
        let n = 4 + (case * 3) % 7;
        let lambda = 10f64.powf(rng.gen_range(-2.0..0.0));
        let params = StaircaseParams::new(s, s, 0.2, 0.35, 0.3, 1.0).unwrap();
        let basis = build_basis(params.s, params.epsilon).unwrap();
        let penalty = build_penalty(&basis);
        let data = sample_dataset(&params, n, 1000 + case as u64);

        let (model, report) =
            fit_robust_diagnostics(&basis, &penalty, &data, &params, lambda, &cfg).unwrap();
        assert!(report.kkt.ok, "case {case} failed its KKT certificate");

        let objective = RobustObjective::new(&basis, &penalty, &data, &params, lambda);
        let solver_value = objective.value(&model.theta);

        let start = fit_standard(&basis, &penalty, &data, lambda).unwrap().theta;
        let oracle_value = subgradient_best_objective(&objective, &start, 1_000_000);

        let gap = (solver_value - oracle_value).abs() / oracle_value.abs().max(1e-12);
        println!(
            "case {case}: s={s} n={n} lambda={lambda:.2e} solver {solver_value:.9} oracle {oracle_value:.9} gap {gap:.3e}"
        );
        assert!(
            gap < 1e-4,
            "case {case} (s={s}, n={n}, lambda={lambda:.2e}): solver {solver_value} vs oracle {oracle_value} (relative gap {gap:.3e})"
        );
    }
}
