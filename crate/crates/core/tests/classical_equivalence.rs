//! Randomized checks that classical and projective-simulable strategies are
//! recovered by the feasibility search.

use povmw::classical::{
    apply_maps, feasibility, ClassicalState, Constraints, FeasibilityStatus, Target, FEASIBLE_TOL,
};
use povmw::quantum::born_correlation;
use povmw::sampling::{dirichlet_point, random_projective_strategy, random_stochastic_map};
use povmw::search::SearchConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn two_level_states_reduce_to_the_canonical_family() {
    let cfg = SearchConfig::for_infeasibility(1).with_restarts(64);
    let canonical = Constraints {
        identical_maps: false,
        adaptive_pair: false,
        canonical: true,
    };
    let mut r = ChaCha8Rng::seed_from_u64(42);
    let mut misses = Vec::new();
    for i in 0..1000 {
        let state = ClassicalState::new(2, 2, dirichlet_point(4, &mut r)).unwrap();
        let maps = [
            random_stochastic_map(3, 2, &mut r),
            random_stochastic_map(3, 2, &mut r),
        ];
        let target = apply_maps(&state, &maps).unwrap();
        let res = feasibility(&Target::Point(target), 2, canonical, &cfg).unwrap();
        if res.status != FeasibilityStatus::Feasible {
            misses.push((i, res.best_residual));
        }
    }
    assert!(misses.is_empty(), "not reproduced: {misses:?}");
}

#[test]
fn projective_simulable_strategies_are_classically_feasible() {
    let cfg = SearchConfig::for_infeasibility(2).with_restarts(128);
    let general = Constraints {
        identical_maps: false,
        adaptive_pair: false,
        canonical: false,
    };
    for seed in 0..100u64 {
        let (d, k) = if seed % 2 == 0 { (2, 3) } else { (2, 4) };
        let s = random_projective_strategy(2, d, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let corr = born_correlation(&s.rho, &s.povms().unwrap()).unwrap();
        let res = feasibility(&Target::Point(corr), d, general, &cfg).unwrap();
        assert_eq!(
            res.status,
            FeasibilityStatus::Feasible,
            "seed {seed}: residual {:.2e}",
            res.best_residual
        );
        assert!(res.best_residual < FEASIBLE_TOL);
    }
}
