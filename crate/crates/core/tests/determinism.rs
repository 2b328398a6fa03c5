//! Sequential and parallel execution must agree bit for bit.

use proptest::prelude::*;

use fracdisk::classes::{ClassParams, Preset};
use fracdisk::fps::{FractionalSeries, Sign};
use fracdisk::geometry::{grid_profile, integral_mean_with, subordination_residual_with, FunctionalKind, VerificationGrid};
use fracdisk::par::Execution;
use fracdisk::Mu;

fn member() -> impl Strategy<Value = (ClassParams, FractionalSeries)> {
    (
        prop::sample::select(vec![Preset::StarlikeMu, Preset::ConvexMu]),
        prop::sample::select(vec!["1", "3/2", "2", "5/4"]),
        0.0..0.9f64,
        prop::collection::vec(0.0..1.0f64, 1..10),
    )
        .prop_map(|(preset, mu, gamma, raw)| {
            let mu: Mu = mu.parse().unwrap();
            let p = ClassParams::preset(preset, mu, gamma).unwrap();
            let weighted: f64 = raw.iter().enumerate().map(|(i, a)| p.xi_weight(i as u32 + 2) * a).sum();
            let scale = if weighted > 0.0 { 0.999 * p.rhs() / weighted } else { 0.0 };
            let f = FractionalSeries::from_dense(mu, Sign::Minus, raw.iter().map(|a| a * scale).collect()).unwrap();
            (p, f)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residual_is_execution_independent((p, f) in member()) {
        let grid = VerificationGrid::new(vec![0.3, 0.7, 0.95], 256, 1e-3).unwrap();
        let seq = subordination_residual_with(&p, &f, &grid, Execution::Sequential).unwrap();
        let par = subordination_residual_with(&p, &f, &grid, Execution::Parallel).unwrap();
        prop_assert_eq!(seq, par);
        prop_assert!(seq.max_abs_w <= 1.0 + 1e-9);
    }

    #[test]
    fn integral_mean_is_execution_independent((_p, f) in member(), q in 0.5..3.0f64, r in 0.1..0.95f64) {
        let g = f.to_general();
        let seq = integral_mean_with(&g, q, r, 1024, Execution::Sequential).unwrap();
        let par = integral_mean_with(&g, q, r, 1024, Execution::Parallel).unwrap();
        prop_assert_eq!(seq.to_bits(), par.to_bits());
    }

    #[test]
    fn profile_is_execution_independent((p, f) in member()) {
        let grid = VerificationGrid::new(vec![0.5, 0.9], 64, 1e-3).unwrap();
        let seq = grid_profile(&p, &f, FunctionalKind::Starlike, &grid, Execution::Sequential).unwrap();
        let par = grid_profile(&p, &f, FunctionalKind::Starlike, &grid, Execution::Parallel).unwrap();
        prop_assert_eq!(seq, par);
    }
}
