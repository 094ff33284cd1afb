use povmw::classical::{apply_maps, ClassicalState, StochasticMap};
use povmw::linalg::{identity, max_abs_diff, min_eigenvalue};
use povmw::quantum::{
    born_correlation, catalog_povm, catalog_state, depolarize_povm, depolarize_state,
    mutual_information, povm_from_bloch, projective_to_classical, COMPLETENESS_TOL, PSD_TOL,
};
use povmw::sampling::{
    dirichlet_point, random_density_matrix, random_projective_strategy, random_stochastic_map,
};
use povmw::tasks::{
    membership, nab_correlation, payoff, region_classify, Fitted, RegionPoint, RegionTask,
    TargetSet, TaskId, TaskSpec,
};
use povmw::Correlation;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_unit(r: &mut ChaCha8Rng) -> [f64; 3] {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(r));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.map(|x| x / n);
        }
    }
}

/// Qubit POVM made of weighted antipodal pairs, always balanced.
fn antipodal_povm(pairs: usize, r: &mut ChaCha8Rng) -> (Vec<f64>, Vec<[f64; 3]>) {
    let t = dirichlet_point(pairs, r);
    let mut weights = Vec::new();
    let mut axes = Vec::new();
    for ti in t {
        let n = random_unit(r);
        weights.extend([ti / 2.0, ti / 2.0]);
        axes.extend([n, n.map(|x| -x)]);
    }
    (weights, axes)
}

fn random_correlation(k: usize, r: &mut ChaCha8Rng) -> Correlation {
    let p = dirichlet_point(k * k, r);
    Correlation::from_fn(vec![k, k], |i| p[i[0] * k + i[1]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projective_simulable_povms_are_valid(seed in any::<u64>(), which in 0usize..3) {
        let (d, k) = [(2, 3), (2, 4), (3, 5)][which];
        let s = random_projective_strategy(2, d, k, &mut rng(seed)).unwrap();
        for povm in s.povms().unwrap() {
            let sum = povm.effects().iter().fold(identity(d).scale(0.0), |acc, e| acc + e);
            prop_assert!(max_abs_diff(&sum, &identity(d)) <= COMPLETENESS_TOL);
            for e in povm.effects() {
                prop_assert!(min_eigenvalue(e) >= -PSD_TOL);
            }
        }
    }

    #[test]
    fn born_output_is_normalized(seed in any::<u64>(), which in 0usize..3) {
        let (d, k) = [(2, 3), (2, 4), (3, 5)][which];
        let mut r = rng(seed);
        let s = random_projective_strategy(2, d, k, &mut r).unwrap();
        let rho = random_density_matrix(&[d, d], &mut r).unwrap();
        let c = born_correlation(&rho, &s.povms().unwrap()).unwrap();
        prop_assert!((c.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(c.probs().iter().all(|&p| p >= -1e-12));
    }

    #[test]
    fn extremal_povm_law_on_singlet(seed in any::<u64>(), pa in 1usize..4, pb in 1usize..4) {
        let mut r = rng(seed);
        let (wa, na) = antipodal_povm(pa, &mut r);
        let (wb, nb) = antipodal_povm(pb, &mut r);
        let c = born_correlation(
            &catalog_state("singlet").unwrap(),
            &[povm_from_bloch(&wa, &na).unwrap(), povm_from_bloch(&wb, &nb).unwrap()],
        )
        .unwrap();
        for a in 0..wa.len() {
            for b in 0..wb.len() {
                let dot: f64 = na[a].iter().zip(&nb[b]).map(|(x, y)| x * y).sum();
                prop_assert!((c.get(&[a, b]) - wa[a] * wb[b] * (1.0 - dot)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn apply_maps_is_a_correlation(seed in any::<u64>(), d in 2usize..4, k in 2usize..6) {
        let mut r = rng(seed);
        let w = dirichlet_point(d * d, &mut r);
        let state = ClassicalState::new(2, d, w).unwrap();
        let maps = [random_stochastic_map(k, d, &mut r), random_stochastic_map(k, d, &mut r)];
        let c = apply_maps(&state, &maps).unwrap();
        prop_assert!((c.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(c.probs().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn relabeling_leaves_symmetric_payoffs_unchanged(seed in any::<u64>(), four in any::<bool>()) {
        let (k, id) = if four { (4, TaskId::G224) } else { (3, TaskId::G223) };
        let mut r = rng(seed);
        let c = random_correlation(k, &mut r);
        let mut perm: Vec<usize> = (0..k).collect();
        use rand::seq::SliceRandom;
        perm.shuffle(&mut r);
        let relabeled = Correlation::from_fn(vec![k, k], |i| c.get(&[perm[i[0]], perm[i[1]]])).unwrap();
        let task = TaskSpec::get(id);
        prop_assert!((payoff(&task, &c).unwrap() - payoff(&task, &relabeled).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn g223_payoff_never_exceeds_one_sixth(seed in any::<u64>()) {
        let c = random_correlation(3, &mut rng(seed));
        prop_assert!(payoff(&TaskSpec::get(TaskId::G223), &c).unwrap() <= 1.0 / 6.0 + 1e-15);
    }

    #[test]
    fn t2_generator_and_fit_round_trip(x in 0.0f64..0.1, four in any::<bool>()) {
        let (k, set) = if four {
            (4usize, TargetSet::T2_224 { x: x / 2.0 })
        } else {
            (3, TargetSet::T2_223 { x })
        };
        let x = if four { x / 2.0 } else { x };
        let y = (1.0 / k as f64 - x) / (k as f64 - 1.0);
        prop_assume!((x - y).abs() > 1e-9);
        let m = membership(&set.correlation().unwrap(), &set, 1e-12);
        prop_assert!(m.member);
        match m.fitted {
            Fitted::Xy { x: fx, y: fy } => {
                prop_assert!((fx - x).abs() <= 1e-12 && (fy - y).abs() <= 1e-12);
            }
            other => prop_assert!(false, "unexpected fit {other:?}"),
        }
    }

    #[test]
    fn regions_partition_the_segment(t in 0.0f64..=1.0, four in any::<bool>()) {
        let task = if four { RegionTask::K4 } else { RegionTask::K3 };
        let x = t * task.x_max();
        prop_assert!(region_classify(&RegionPoint::on_line(task, x)).is_ok());
    }

    #[test]
    fn product_inputs_carry_no_information(seed in any::<u64>(), k in 2usize..6) {
        let mut r = rng(seed);
        let pa = dirichlet_point(k, &mut r);
        let pb = dirichlet_point(k, &mut r);
        let c = Correlation::from_fn(vec![k, k], |i| pa[i[0]] * pb[i[1]]).unwrap();
        let mi = mutual_information(&c).unwrap();
        prop_assert!(mi.abs() <= 1e-12, "{mi}");
    }

    #[test]
    fn projective_round_trip(seed in any::<u64>(), which in 0usize..3) {
        let (d, k) = [(2, 3), (2, 4), (3, 5)][which];
        let s = random_projective_strategy(2, d, k, &mut rng(seed)).unwrap();
        let q = born_correlation(&s.rho, &s.povms().unwrap()).unwrap();
        let (state, maps) = projective_to_classical(&s.rho, &s.bases, &s.posts).unwrap();
        prop_assert!(q.max_abs_diff(&apply_maps(&state, &maps).unwrap()) <= 1e-12);
    }
}

#[test]
fn noisy_trine_family_depends_on_the_noise_product() {
    let grid = [0.2, 0.4, 0.6, 0.8, 1.0];
    let singlet = catalog_state("singlet").unwrap();
    let trine = catalog_povm("trine").unwrap();
    for &es in &grid {
        for &ea in &grid {
            for &eb in &grid {
                let c = born_correlation(
                    &depolarize_state(&singlet, es).unwrap(),
                    &[
                        depolarize_povm(&trine, ea).unwrap(),
                        depolarize_povm(&trine, eb).unwrap(),
                    ],
                )
                .unwrap();
                let e = es * ea * eb;
                for a in 0..3 {
                    for b in 0..3 {
                        let want = if a == b {
                            (1.0 - e) / 9.0
                        } else {
                            (2.0 + e) / 18.0
                        };
                        assert!((c.get(&[a, b]) - want).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn nab_table_matches_noisy_qutrit_strategy() {
    let state = catalog_state("qutrit_state_235").unwrap();
    let povm = catalog_povm("qutrit_povm_5").unwrap();
    for i in 0..=10 {
        for j in 0..=10 {
            let (p, eps) = (i as f64 / 10.0, j as f64 / 10.0);
            let table = nab_correlation(p, eps).unwrap();
            table.validate(1e-12).unwrap();
            let noisy = depolarize_povm(&povm, eps).unwrap();
            let q = born_correlation(
                &depolarize_state(&state, p).unwrap(),
                &[noisy.clone(), noisy],
            )
            .unwrap();
            assert!(
                q.max_abs_diff(&table) <= 1e-12,
                "p={p} eps={eps}: {}",
                q.max_abs_diff(&table)
            );
        }
    }
}

#[test]
fn stochastic_map_columns_sum_to_one() {
    let mut r = rng(3);
    for _ in 0..100 {
        let m: StochasticMap = random_stochastic_map(5, 3, &mut r);
        for col in 0..3 {
            let s: f64 = (0..5).map(|l| m.get(l, col)).sum();
            assert!((s - 1.0).abs() <= 1e-12);
        }
    }
}
